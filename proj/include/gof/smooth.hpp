#pragma once

#include <cstddef>
#include <span>

namespace gof {

inline constexpr std::size_t kMaxSmoothOrder = 12;

// Number of orthonormal components in the Neyman smooth alternative.
class SmoothConfig {
public:
    // Throws PreconditionError unless 1 <= k <= kMaxSmoothOrder.
    explicit SmoothConfig(std::size_t k);
    std::size_t k() const { return k_; }

private:
    std::size_t k_;
};

// Legendre polynomial of order i shifted to [0, 1] and scaled to be
// orthonormal under the uniform density: pi_i(z) = sqrt(2i+1) P_i(2z-1).
// Order 0 is the constant 1.
double legendre_pi(std::size_t order, double z);

// pi_1(z) ... pi_{out.size()}(z) by the three-term recurrence.
void legendre_pi_all(double z, std::span<double> out);

// N_k = (1/n) sum_{i=1..k} (sum_j pi_i(z_j))^2.
// Throws PreconditionError for an empty sample or z outside [0, 1].
double neyman_statistic(std::span<const double> z, const SmoothConfig& cfg);

}  // namespace gof
