#include "gof/edf.hpp"

#include <algorithm>
#include <cmath>

#include "gof/error.hpp"
#include "gof/summation.hpp"

namespace gof {

namespace {

void check_sorted_unit(std::span<const double> z) {
    if (z.empty()) {
        throw PreconditionError("EDF statistics need a non-empty sample");
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] >= 0.0 && z[i] <= 1.0)) {
            throw PreconditionError("PIT values must lie in [0, 1]");
        }
        if (i > 0 && z[i] < z[i - 1]) {
            throw PreconditionError("PIT sample must be sorted");
        }
    }
}

}  // namespace

SupremumStats supremum_stats(std::span<const double> z) {
    check_sorted_unit(z);
    const auto n = static_cast<double>(z.size());
    SupremumStats s;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double rank = static_cast<double>(i + 1);
        s.d_plus = std::max(s.d_plus, rank / n - z[i]);
        s.d_minus = std::max(s.d_minus, z[i] - (rank - 1.0) / n);
    }
    s.d = std::max(s.d_plus, s.d_minus);
    s.v = s.d_plus + s.d_minus;
    return s;
}

QuadraticStats quadratic_stats(std::span<const double> z) {
    check_sorted_unit(z);
    const std::size_t count = z.size();
    const auto n = static_cast<double>(count);

    QuadraticStats q;
    NeumaierSum w2;
    NeumaierSum ad;
    NeumaierSum mean;
    for (std::size_t i = 0; i < count; ++i) {
        const double k = static_cast<double>(2 * i + 1);
        const double dev = z[i] - k / (2.0 * n);
        w2.add(dev * dev);
        mean.add(z[i]);

        double lo = z[i];
        double hi = z[count - 1 - i];
        if (lo <= 0.0 || lo >= 1.0 || hi <= 0.0 || hi >= 1.0) {
            q.a2_clamped = true;
            lo = std::clamp(lo, kAndersonDarlingEpsilon, 1.0 - kAndersonDarlingEpsilon);
            hi = std::clamp(hi, kAndersonDarlingEpsilon, 1.0 - kAndersonDarlingEpsilon);
        }
        ad.add(k * (std::log(lo) + std::log1p(-hi)));
    }
    q.w2 = w2.value() + 1.0 / (12.0 * n);
    q.a2 = -n - ad.value() / n;
    const double centered = mean.value() / n - 0.5;
    q.u2 = q.w2 - n * centered * centered;
    return q;
}

EdfStatistics edf_statistics(std::span<const double> z) {
    return {supremum_stats(z), quadratic_stats(z)};
}

}  // namespace gof
