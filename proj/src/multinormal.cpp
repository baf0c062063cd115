#include "gof/multinormal.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "gof/error.hpp"
#include "gof/simd/kernels.hpp"
#include "gof/summation.hpp"

namespace gof {

namespace {

MardiaStats mardia_whitened(const Sample& y) {
    const std::size_t n = y.size();
    const simd::SoaPoints soa(y.coords(), y.dim());
    const auto& kern = simd::active_kernels();
    NeumaierSum skew;
    NeumaierSum kurt;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = y.point(i);
        skew.add(kern.cubed_dot_row(p, soa, 0, n));
        double r2 = 0.0;
        for (double c : p) r2 += c * c;
        kurt.add(r2 * r2);
    }
    const auto nn = static_cast<double>(n);
    return {skew.value() / (nn * nn), kurt.value() / nn};
}

void check_dim(const Sample& sample) {
    if (sample.dim() < 2) {
        throw DimensionError("Mardia statistics need dim >= 2");
    }
}

// Enumerates multi-indices with total degree in [1, k], last axis fastest.
void for_each_index(std::size_t dim, std::size_t k,
                    const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(dim, 0);
    for (;;) {
        std::size_t axis = dim;
        while (axis-- > 0) {
            if (++idx[axis] <= k) break;
            idx[axis] = 0;
            if (axis == 0) return;
        }
        std::size_t total = 0;
        for (std::size_t a : idx) total += a;
        if (total >= 1 && total <= k) fn(idx);
    }
}

}  // namespace

MardiaStats mardia_statistics(const Sample& sample, const GaussianModel& h0) {
    check_dim(sample);
    return mardia_whitened(h0.whiten(sample));
}

MardiaStats mardia_statistics_estimated(const Sample& sample) {
    check_dim(sample);
    const std::size_t d = sample.dim();
    const auto dd = static_cast<Eigen::Index>(d);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dd);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t k = 0; k < d; ++k) mean[static_cast<Eigen::Index>(k)] += sample.point(i)[k];
    }
    mean /= static_cast<double>(sample.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dd, dd);
    Eigen::VectorXd x(dd);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            x[static_cast<Eigen::Index>(k)] = sample.point(i)[k] - mean[static_cast<Eigen::Index>(k)];
        }
        cov += x * x.transpose();
    }
    cov /= static_cast<double>(sample.size());
    // Symmetrize against rounding before the Cholesky check.
    cov = 0.5 * (cov + cov.transpose()).eval();
    return mardia_whitened(GaussianModel(mean, cov).whiten(sample));
}

std::size_t neyman_multivariate_terms(std::size_t dim, std::size_t k) {
    std::size_t count = 0;
    for_each_index(dim, k, [&](const std::vector<std::size_t>&) { ++count; });
    return count;
}

double neyman_multivariate(const Sample& sample, const GaussianModel& h0, const SmoothConfig& cfg) {
    const std::size_t d = sample.dim();
    const std::size_t k = cfg.k();
    const Sample y = h0.whiten(sample);
    const std::size_t n = y.size();

    // pis[(i * d + axis) * (k + 1) + order], order 0 is the constant 1.
    std::vector<double> pis(n * d * (k + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t axis = 0; axis < d; ++axis) {
            const double u = 0.5 * std::erfc(-y.point(i)[axis] / std::numbers::sqrt2);
            double* row = pis.data() + (i * d + axis) * (k + 1);
            row[0] = 1.0;
            legendre_pi_all(u, std::span<double>(row + 1, k));
        }
    }

    double total = 0.0;
    for_each_index(d, k, [&](const std::vector<std::size_t>& idx) {
        NeumaierSum component;
        for (std::size_t i = 0; i < n; ++i) {
            double term = 1.0;
            for (std::size_t axis = 0; axis < d; ++axis) {
                term *= pis[(i * d + axis) * (k + 1) + idx[axis]];
            }
            component.add(term);
        }
        const double c = component.value();
        total += c * c;
    });
    return total / static_cast<double>(n);
}

}  // namespace gof
