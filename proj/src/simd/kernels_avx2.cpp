// AVX2 kernel table. Compiled with -mavx2 -mfma; only called after the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <array>
#include <cstdint>
#include <limits>

#include "gof/simd/kernels.hpp"

namespace gof::simd {

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;  // 0x3fe62e42fee00000
constexpr double kLn2Lo = 1.90821492927058770002e-10;  // 0x3dea39ef35793c76
constexpr double kLog2e = 1.44269504088896338700e+00;
constexpr double kSqrt2 = 1.41421356237309504880e+00;

// ln(x) for positive normal x. x = m 2^e with m in [sqrt(1/2), sqrt(2)),
// ln m = 2 atanh(s), s = (m - 1) / (m + 1), |s| <= 0.1716; the odd series
// is truncated after s^23, leaving a relative error below 1e-17.
inline __m256d log_pd(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    // Biased exponent -> double via the 2^52 trick.
    const __m256i biased = _mm256_srli_epi64(bits, 52);
    const __m256i two52_bits = _mm256_set1_epi64x(0x4330000000000000ll);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, two52_bits)),
                              _mm256_set1_pd(4503599627370496.0 + 1023.0));

    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GE_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d s2 = _mm256_mul_pd(s, s);
    __m256d poly = _mm256_set1_pd(1.0 / 23.0);
    for (int k = 21; k >= 1; k -= 2) {
        poly = _mm256_add_pd(_mm256_mul_pd(poly, s2), _mm256_set1_pd(1.0 / k));
    }
    const __m256d log_m = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), poly);
    return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)),
                         _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo)), log_m));
}

// exp(x): x = k ln2 + r with |r| <= ln2 / 2, degree-13 Taylor polynomial for
// exp(r), then scaling by 2^k through the exponent field. Results below the
// normal range flush to zero.
inline __m256d exp_pd(__m256d x) {
    const __m256d lo_limit = _mm256_set1_pd(-708.0);
    const __m256d hi_limit = _mm256_set1_pd(709.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo_limit), hi_limit);

    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(k, _mm256_set1_pd(kLn2Hi)));
    r = _mm256_sub_pd(r, _mm256_mul_pd(k, _mm256_set1_pd(kLn2Lo)));

    static constexpr std::array<double, 14> kInvFactorial = {
        1.0,
        1.0,
        1.0 / 2.0,
        1.0 / 6.0,
        1.0 / 24.0,
        1.0 / 120.0,
        1.0 / 720.0,
        1.0 / 5040.0,
        1.0 / 40320.0,
        1.0 / 362880.0,
        1.0 / 3628800.0,
        1.0 / 39916800.0,
        1.0 / 479001600.0,
        1.0 / 6227020800.0,
    };
    __m256d poly = _mm256_set1_pd(kInvFactorial[13]);
    for (int i = 12; i >= 0; --i) {
        poly = _mm256_add_pd(_mm256_mul_pd(poly, r), _mm256_set1_pd(kInvFactorial[i]));
    }

    const __m128i k32 = _mm256_cvtpd_epi32(k);
    const __m256i k64 = _mm256_add_epi64(_mm256_cvtepi32_epi64(k32), _mm256_set1_epi64x(1023));
    const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(k64, 52));
    const __m256d out = _mm256_mul_pd(poly, scale);
    return _mm256_andnot_pd(underflow, out);
}

inline __m256i tail_mask(std::size_t remaining) {
    const __m256i lane = _mm256_set_epi64x(3, 2, 1, 0);
    return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(remaining)), lane);
}

// Lane-wise Neumaier accumulator, reduced in lane order.
struct LaneSum {
    __m256d sum = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();

    void add(__m256d x) {
        const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
        const __m256d t = _mm256_add_pd(sum, x);
        const __m256d sum_bigger =
            _mm256_cmp_pd(_mm256_and_pd(sum, abs_mask), _mm256_and_pd(x, abs_mask), _CMP_GE_OQ);
        const __m256d a = _mm256_add_pd(_mm256_sub_pd(sum, t), x);
        const __m256d b = _mm256_add_pd(_mm256_sub_pd(x, t), sum);
        comp = _mm256_add_pd(comp, _mm256_blendv_pd(b, a, sum_bigger));
        sum = t;
    }

    NeumaierSum reduce() const {
        alignas(32) std::array<double, 4> s;
        alignas(32) std::array<double, 4> c;
        _mm256_store_pd(s.data(), sum);
        _mm256_store_pd(c.data(), comp);
        NeumaierSum out;
        for (int i = 0; i < 4; ++i) {
            out.add(NeumaierSum(s[i], c[i]));
        }
        return out;
    }
};

inline __m256d load(const double* p, std::size_t remaining, __m256i mask) {
    return remaining >= 4 ? _mm256_loadu_pd(p) : _mm256_maskload_pd(p, mask);
}

inline __m256d kernel_pd(__m256d r2, const PairKernelParams& params) {
    const __m256d dmin2 = _mm256_set1_pd(params.d_min * params.d_min);
    r2 = _mm256_max_pd(r2, dmin2);
    switch (params.family) {
        case KernelFamily::power:
            // r^-kappa = exp(-kappa/2 ln r^2)
            return exp_pd(_mm256_mul_pd(_mm256_set1_pd(-0.5 * params.kappa), log_pd(r2)));
        case KernelFamily::log:
            return _mm256_mul_pd(_mm256_set1_pd(-0.5), log_pd(r2));
        case KernelFamily::gaussian:
            return exp_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), r2),
                                        _mm256_set1_pd(params.inv_two_s2)));
    }
    return _mm256_setzero_pd();
}

NeumaierSum pair_row_avx2(std::span<const double> query, const SoaPoints& points,
                          std::size_t begin, std::size_t end, const PairKernelParams& params) {
    LaneSum acc;
    for (std::size_t j = begin; j < end; j += 4) {
        const std::size_t remaining = end - j;
        const __m256i mask = tail_mask(remaining);
        __m256d r2 = _mm256_setzero_pd();
        for (std::size_t k = 0; k < points.dim; ++k) {
            const __m256d d =
                _mm256_sub_pd(_mm256_set1_pd(query[k]), load(points.axis(k) + j, remaining, mask));
            r2 = _mm256_add_pd(r2, _mm256_mul_pd(d, d));
        }
        __m256d value = kernel_pd(r2, params);
        if (remaining < 4) {
            value = _mm256_and_pd(value, _mm256_castsi256_pd(mask));
        }
        acc.add(value);
    }
    return acc.reduce();
}

NeumaierSum cubed_dot_row_avx2(std::span<const double> query, const SoaPoints& points,
                               std::size_t begin, std::size_t end) {
    LaneSum acc;
    for (std::size_t j = begin; j < end; j += 4) {
        const std::size_t remaining = end - j;
        const __m256i mask = tail_mask(remaining);
        __m256d dot = _mm256_setzero_pd();
        for (std::size_t k = 0; k < points.dim; ++k) {
            dot = _mm256_add_pd(
                dot, _mm256_mul_pd(_mm256_set1_pd(query[k]), load(points.axis(k) + j, remaining, mask)));
        }
        acc.add(_mm256_mul_pd(_mm256_mul_pd(dot, dot), dot));
    }
    return acc.reduce();
}

double region_layer_avx2(const double* best, const double* counts, const double* probs,
                         std::size_t end, double count_j, double prob_j, double n,
                         bool chi_weights) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const __m256d vneg_inf = _mm256_set1_pd(neg_inf);
    const __m256d vcount = _mm256_set1_pd(count_j);
    const __m256d vprob = _mm256_set1_pd(prob_j);
    const __m256d vn = _mm256_set1_pd(n);
    __m256d out = vneg_inf;
    for (std::size_t i = 0; i < end; i += 4) {
        const std::size_t remaining = end - i;
        const __m256i mask = tail_mask(remaining);
        const __m256d dp = _mm256_sub_pd(vprob, load(probs + i, remaining, mask));
        const __m256d dev =
            _mm256_sub_pd(_mm256_sub_pd(vcount, load(counts + i, remaining, mask)), _mm256_mul_pd(vn, dp));
        __m256d term = _mm256_mul_pd(dev, dev);
        __m256d valid = remaining >= 4 ? _mm256_castsi256_pd(_mm256_set1_epi64x(-1))
                                       : _mm256_castsi256_pd(mask);
        if (chi_weights) {
            valid = _mm256_and_pd(valid, _mm256_cmp_pd(dp, _mm256_setzero_pd(), _CMP_GT_OQ));
            term = _mm256_div_pd(term, _mm256_mul_pd(vn, dp));
        }
        const __m256d v = _mm256_add_pd(load(best + i, remaining, mask), term);
        out = _mm256_max_pd(out, _mm256_blendv_pd(vneg_inf, v, valid));
    }
    alignas(32) std::array<double, 4> lanes;
    _mm256_store_pd(lanes.data(), out);
    double m = lanes[0];
    for (int i = 1; i < 4; ++i) {
        if (lanes[i] > m) m = lanes[i];
    }
    return m;
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{Isa::avx2, pair_row_avx2, cubed_dot_row_avx2,
                                   region_layer_avx2};
    return table;
}

}  // namespace gof::simd
