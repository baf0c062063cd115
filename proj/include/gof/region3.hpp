#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gof {

enum class RegionWeights {
    unit,                 // w_k = 1
    inverse_expectation,  // w_k = 1 / (n p_k), maximizes chi^2 of the regions
};

// A partition of [0, 1] into contiguous regions at the cut positions.
struct RegionSplit {
    std::vector<double> cuts;         // r - 1 non-decreasing interior cuts
    std::vector<std::size_t> counts;  // r observed counts, summing to n
    std::vector<double> probs;        // r expected fractions, summing to 1

    double cut_lo() const { return cuts.front(); }
    double cut_hi() const { return cuts.back(); }
};

struct RegionResult {
    double value = 0.0;
    RegionSplit split;
};

// Cut candidates. A cut just below z_i counts the points < z_i, a cut just
// above counts the points <= z_i; both sit at probability z_i. Together with
// 0 and 1 these realize every achievable (count, probability) pair, so the
// supremum over all cut positions is a maximum over this finite set.
struct CutCandidates {
    std::vector<double> counts;  // points left of the cut
    std::vector<double> probs;   // cut position on the PIT scale
};
CutCandidates cut_candidates(std::span<const double> z);

// O = sup over contiguous r-region partitions of sum_k w_k (n_k - n p_k)^2,
// for a sorted PIT sample, r in {3, 4, 5}. Regions with p_k = 0 are not
// admissible under inverse_expectation weights.
//
// Dynamic programme over the cut candidates, O(r n^2). Throws
// PreconditionError for unsorted or out-of-range input and when no partition
// is admissible.
RegionResult region_statistic(std::span<const double> z, RegionWeights weights,
                              std::size_t regions);

inline RegionResult three_region_statistic(std::span<const double> z, RegionWeights weights) {
    return region_statistic(z, weights, 3);
}

}  // namespace gof
