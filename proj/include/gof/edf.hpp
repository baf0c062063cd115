#pragma once

#include <span>

namespace gof {

// Binning-free statistics of the empirical distribution function. All
// functions take the sorted PIT sample z_1 <= ... <= z_n in [0, 1].

struct SupremumStats {
    double d_plus = 0.0;   // sup (F_n - z)
    double d_minus = 0.0;  // sup (z - F_n)
    double d = 0.0;        // Kolmogorov
    double v = 0.0;        // Kuiper
};

struct QuadraticStats {
    double w2 = 0.0;  // Cramer-von Mises
    double a2 = 0.0;  // Anderson-Darling
    double u2 = 0.0;  // Watson
    // True when some z was exactly 0 or 1 and had to be clamped for A^2.
    bool a2_clamped = false;
};

struct EdfStatistics {
    SupremumStats sup;
    QuadraticStats quad;
};

// Clamp applied to z before the logarithms of A^2.
inline constexpr double kAndersonDarlingEpsilon = 1e-10;

// Throws PreconditionError when z is empty, unsorted or leaves [0, 1].
SupremumStats supremum_stats(std::span<const double> z);
QuadraticStats quadratic_stats(std::span<const double> z);
EdfStatistics edf_statistics(std::span<const double> z);

}  // namespace gof
