#include "gof/region3.hpp"

#include <limits>
#include <string>

#include "gof/error.hpp"
#include "gof/simd/kernels.hpp"

namespace gof {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Same operation sequence as the kernel tables.
inline double region_term(double count_i, double prob_i, double count_j, double prob_j, double n,
                          bool chi) {
    const double dp = prob_j - prob_i;
    const double dev = (count_j - count_i) - n * dp;
    double term = dev * dev;
    if (chi) {
        if (!(dp > 0.0)) return kNegInf;
        term = term / (n * dp);
    }
    return term;
}

}  // namespace

CutCandidates cut_candidates(std::span<const double> z) {
    CutCandidates c;
    const std::size_t n = z.size();
    c.counts.reserve(2 * n + 2);
    c.probs.reserve(2 * n + 2);
    c.counts.push_back(0.0);
    c.probs.push_back(0.0);
    // One pair per distinct value keeps both sequences non-decreasing.
    for (std::size_t i = 0; i < n;) {
        std::size_t end = i;
        while (end < n && z[end] == z[i]) ++end;
        c.counts.push_back(static_cast<double>(i));
        c.probs.push_back(z[i]);
        c.counts.push_back(static_cast<double>(end));
        c.probs.push_back(z[i]);
        i = end;
    }
    c.counts.push_back(static_cast<double>(n));
    c.probs.push_back(1.0);
    return c;
}

RegionResult region_statistic(std::span<const double> z, RegionWeights weights,
                              std::size_t regions) {
    if (regions < 3 || regions > 5) {
        throw PreconditionError("region count must be 3, 4 or 5, got " + std::to_string(regions));
    }
    if (z.empty()) {
        throw PreconditionError("region statistic needs a non-empty sample");
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] >= 0.0 && z[i] <= 1.0) || (i > 0 && z[i] < z[i - 1])) {
            throw PreconditionError("region statistic needs a sorted sample in [0, 1]");
        }
    }

    const bool chi = weights == RegionWeights::inverse_expectation;
    const auto n = static_cast<double>(z.size());
    const CutCandidates cand = cut_candidates(z);
    const std::size_t m = cand.counts.size();
    const std::size_t last = m - 1;
    const auto& kern = simd::active_kernels();

    // layers[l][j]: best sum of the first l+1 regions with cut l ending at j.
    std::vector<std::vector<double>> layers(regions - 1, std::vector<double>(m, kNegInf));
    for (std::size_t j = 0; j < m; ++j) {
        layers[0][j] = 0.0 + region_term(0.0, 0.0, cand.counts[j], cand.probs[j], n, chi);
    }
    for (std::size_t l = 1; l + 1 < regions; ++l) {
        for (std::size_t j = 0; j < m; ++j) {
            layers[l][j] = kern.region_layer(layers[l - 1].data(), cand.counts.data(),
                                             cand.probs.data(), j + 1, cand.counts[j],
                                             cand.probs[j], n, chi);
        }
    }
    const auto& top = layers.back();
    const double value = kern.region_layer(top.data(), cand.counts.data(), cand.probs.data(), m,
                                           cand.counts[last], cand.probs[last], n, chi);
    if (value == kNegInf) {
        throw PreconditionError("no admissible region partition (need distinct interior points)");
    }

    // Backtrack: first index reproducing each layer maximum exactly.
    std::vector<std::size_t> idx(regions - 1);
    double target = value;
    std::size_t end = last;
    for (std::size_t l = regions - 1; l-- > 0;) {
        const double prev_end_count = cand.counts[end];
        const double prev_end_prob = cand.probs[end];
        for (std::size_t i = 0; i <= end; ++i) {
            const double v = layers[l][i] + region_term(cand.counts[i], cand.probs[i],
                                                        prev_end_count, prev_end_prob, n, chi);
            if (v == target) {
                idx[l] = i;
                break;
            }
        }
        target = layers[l][idx[l]];
        end = idx[l];
    }

    RegionResult out;
    out.value = value;
    double prev_count = 0.0;
    double prev_prob = 0.0;
    for (std::size_t l = 0; l < idx.size(); ++l) {
        out.split.cuts.push_back(cand.probs[idx[l]]);
        out.split.counts.push_back(static_cast<std::size_t>(cand.counts[idx[l]] - prev_count));
        out.split.probs.push_back(cand.probs[idx[l]] - prev_prob);
        prev_count = cand.counts[idx[l]];
        prev_prob = cand.probs[idx[l]];
    }
    out.split.counts.push_back(static_cast<std::size_t>(n - prev_count));
    out.split.probs.push_back(1.0 - prev_prob);
    return out;
}

}  // namespace gof
