#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gof/hypothesis.hpp"
#include "gof/sample.hpp"

namespace gof {

// Rectangular-grid histogram. Bins are flattened row-major over the axes
// (last axis fastest). For one axis, bin i covers [edges[i], edges[i+1]),
// the last bin is closed on the right.
struct Histogram {
    std::vector<std::vector<double>> edges;  // one strictly increasing edge list per axis
    std::vector<double> counts;              // observed contents Y_i / N_i
    std::vector<double> expectations;        // t_i = E(Y_i), or N p_i
    std::optional<std::vector<double>> variances;      // delta_i^2, gaussian mode only
    std::optional<std::vector<double>> probabilities;  // p_i, multinomial mode only

    std::size_t bins() const { return counts.size(); }
    double total() const;
};

enum class Chi2Mode { gaussian, pearson, multinomial };
enum class BinningPolicy { equal_width, equal_probability };

struct Chi2Result {
    double value = 0.0;
    std::size_t dof = 0;
};

// Throws InvalidBinError for any expectation (or variance) <= 0 and
// PreconditionError for inconsistent lengths or a missing field required by
// the mode.
Chi2Result chi2_statistic(const Histogram& h, Chi2Mode mode);

// round(2 n^{2/5}), at least 1.
std::size_t bin_count_rule(std::size_t n);

// One-dimensional histogram of `sample` against `h` with B bins.
// Throws PolicyError for equal_width on unbounded support, PreconditionError
// when equal_probability is requested without a quantile function, and
// DomainError for points outside the support.
Histogram bin_uniform(const Sample& sample, const UnivariateHypothesis& h, std::size_t bins,
                      BinningPolicy policy);

// Equal-probability grid on the unit cube: `bins_per_axis` cells per axis
// for a sample already transformed to [0, 1]^d.
Histogram bin_unit_grid(const Sample& z, std::size_t bins_per_axis);

// Upper-tail probability of the chi-square distribution with `dof` degrees
// of freedom. Asymptotic approximation only; calibrated p-values come from
// the Monte Carlo engine.
double chi2_asymptotic_pvalue(double value, std::size_t dof);

}  // namespace gof
