#include <limits>

#include "gof/simd/kernels.hpp"

namespace gof::simd {

namespace {

NeumaierSum pair_row_scalar(std::span<const double> query, const SoaPoints& points,
                            std::size_t begin, std::size_t end, const PairKernelParams& params) {
    NeumaierSum sum;
    for (std::size_t j = begin; j < end; ++j) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < points.dim; ++k) {
            const double d = query[k] - points.axis(k)[j];
            r2 += d * d;
        }
        sum.add(kernel_value(params, std::sqrt(r2)));
    }
    return sum;
}

NeumaierSum cubed_dot_row_scalar(std::span<const double> query, const SoaPoints& points,
                                 std::size_t begin, std::size_t end) {
    NeumaierSum sum;
    for (std::size_t j = begin; j < end; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < points.dim; ++k) {
            dot += query[k] * points.axis(k)[j];
        }
        sum.add(dot * dot * dot);
    }
    return sum;
}

double region_layer_scalar(const double* best, const double* counts, const double* probs,
                           std::size_t end, double count_j, double prob_j, double n,
                           bool chi_weights) {
    double out = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < end; ++i) {
        const double dp = prob_j - probs[i];
        const double dev = (count_j - counts[i]) - n * dp;
        double term = dev * dev;
        if (chi_weights) {
            if (!(dp > 0.0)) continue;
            term = term / (n * dp);
        }
        const double v = best[i] + term;
        if (v > out) out = v;
    }
    return out;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::scalar, pair_row_scalar, cubed_dot_row_scalar,
                                   region_layer_scalar};
    return table;
}

}  // namespace gof::simd
