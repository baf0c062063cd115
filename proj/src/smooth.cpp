#include "gof/smooth.hpp"

#include <array>
#include <cmath>
#include <string>

#include "gof/error.hpp"
#include "gof/summation.hpp"

namespace gof {

SmoothConfig::SmoothConfig(std::size_t k) : k_(k) {
    if (k_ < 1 || k_ > kMaxSmoothOrder) {
        throw PreconditionError("smooth test order k must be in [1, " +
                                std::to_string(kMaxSmoothOrder) + "], got " + std::to_string(k));
    }
}

void legendre_pi_all(double z, std::span<double> out) {
    const double x = 2.0 * z - 1.0;
    double prev = 1.0;  // P_0
    double cur = x;     // P_1
    for (std::size_t i = 1; i <= out.size(); ++i) {
        out[i - 1] = std::sqrt(static_cast<double>(2 * i + 1)) * cur;
        const auto order = static_cast<double>(i);
        const double next = ((2.0 * order + 1.0) * x * cur - order * prev) / (order + 1.0);
        prev = cur;
        cur = next;
    }
}

double legendre_pi(std::size_t order, double z) {
    if (order == 0) return 1.0;
    std::array<double, 64> buf{};
    if (order > buf.size()) {
        throw PreconditionError("legendre order too large");
    }
    legendre_pi_all(z, std::span<double>(buf.data(), order));
    return buf[order - 1];
}

double neyman_statistic(std::span<const double> z, const SmoothConfig& cfg) {
    if (z.empty()) {
        throw PreconditionError("Neyman statistic needs a non-empty sample");
    }
    const std::size_t k = cfg.k();
    std::array<NeumaierSum, kMaxSmoothOrder> sums{};
    std::array<double, kMaxSmoothOrder> pis{};
    for (double v : z) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw PreconditionError("Neyman statistic needs z in [0, 1]");
        }
        legendre_pi_all(v, std::span<double>(pis.data(), k));
        for (std::size_t i = 0; i < k; ++i) {
            sums[i].add(pis[i]);
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double s = sums[i].value();
        total += s * s;
    }
    return total / static_cast<double>(z.size());
}

}  // namespace gof
