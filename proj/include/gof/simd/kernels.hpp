#pragma once

// Data-parallel inner loops shared by the energy test, the Mardia skewness
// and the three-region scan. Each loop has a scalar reference version and an
// AVX2 version; the active table is chosen once at runtime from the CPU
// features and can be pinned with GOF_SIMD=scalar|avx2 or set_active_isa().

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gof/summation.hpp"

namespace gof {

enum class KernelFamily { power, log, gaussian };

namespace simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Correlation-function parameters in the form the loops consume.
struct PairKernelParams {
    KernelFamily family = KernelFamily::gaussian;
    double kappa = 0.0;       // power family exponent
    double inv_two_s2 = 0.0;  // gaussian: 1 / (2 s^2)
    double d_min = 0.0;       // distance cutoff
};

// R(max(r, d_min)) evaluated with the standard library; the scalar
// reference for every kernel table.
inline double kernel_value(const PairKernelParams& p, double r) {
    const double rc = r < p.d_min ? p.d_min : r;
    switch (p.family) {
        case KernelFamily::power:
            return std::pow(rc, -p.kappa);
        case KernelFamily::log:
            return -std::log(rc);
        case KernelFamily::gaussian:
            return std::exp(-(rc * rc) * p.inv_two_s2);
    }
    return 0.0;
}

// Points in structure-of-arrays layout: coordinate k of point j lives at
// data[k * stride + j].
struct SoaPoints {
    std::vector<double> data;
    std::size_t dim = 0;
    std::size_t count = 0;

    SoaPoints() = default;
    SoaPoints(std::span<const double> row_major, std::size_t dim);
    const double* axis(std::size_t k) const { return data.data() + k * count; }
};

// sum_{j in [begin, end)} R(|query - p_j|)
using PairRowFn = NeumaierSum (*)(std::span<const double> query, const SoaPoints& points,
                                  std::size_t begin, std::size_t end,
                                  const PairKernelParams& params);

// sum_{j in [begin, end)} (query . p_j)^3
using CubedDotRowFn = NeumaierSum (*)(std::span<const double> query, const SoaPoints& points,
                                      std::size_t begin, std::size_t end);

// max_{i < end} best[i] + w(counts[j] - counts[i] - n (probs[j] - probs[i]))^2
// where w = 1 (unit) or 1 / (n (probs[j] - probs[i])) (chi); chi terms with
// probs[j] - probs[i] <= 0 are skipped. Returns -inf when nothing qualifies.
// Bit-identical across tables: max is order independent and each term is
// computed with the same operation sequence.
using RegionLayerFn = double (*)(const double* best, const double* counts, const double* probs,
                                 std::size_t end, double count_j, double prob_j, double n,
                                 bool chi_weights);

struct KernelTable {
    Isa isa;
    PairRowFn pair_row;
    CubedDotRowFn cubed_dot_row;
    RegionLayerFn region_layer;
};

const KernelTable& scalar_kernels();
// nullptr when the ISA is not compiled in or not supported by this CPU.
const KernelTable* kernels_for(Isa isa);
std::vector<Isa> available_isas();

const KernelTable& active_kernels();
Isa active_isa();
// Throws PreconditionError when the ISA is unavailable.
void set_active_isa(Isa isa);

}  // namespace simd
}  // namespace gof
