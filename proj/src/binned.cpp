#include "gof/binned.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "gof/error.hpp"
#include "gof/summation.hpp"

namespace gof {

namespace {

std::size_t locate(const std::vector<double>& edges, double x) {
    // Interior edges only: a point on an interior edge belongs to the right
    // bin, a point on the last edge to the last bin.
    const auto first = edges.begin() + 1;
    const auto last = edges.end() - 1;
    return static_cast<std::size_t>(std::upper_bound(first, last, x) - first);
}

}  // namespace

double Histogram::total() const {
    NeumaierSum s;
    for (double c : counts) s.add(c);
    return s.value();
}

Chi2Result chi2_statistic(const Histogram& h, Chi2Mode mode) {
    const std::size_t b = h.bins();
    if (b == 0 || h.expectations.size() != b) {
        throw PreconditionError("histogram counts and expectations must have equal, positive length");
    }
    for (std::size_t i = 0; i < b; ++i) {
        if (!(h.expectations[i] > 0.0)) {
            throw InvalidBinError("bin " + std::to_string(i) + " has non-positive expectation");
        }
    }

    NeumaierSum sum;
    Chi2Result out;
    switch (mode) {
        case Chi2Mode::gaussian: {
            if (!h.variances || h.variances->size() != b) {
                throw PreconditionError("gaussian chi-square needs per-bin variances");
            }
            for (std::size_t i = 0; i < b; ++i) {
                const double var = (*h.variances)[i];
                if (!(var > 0.0)) {
                    throw InvalidBinError("bin " + std::to_string(i) + " has non-positive variance");
                }
                const double d = h.counts[i] - h.expectations[i];
                sum.add(d * d / var);
            }
            out.dof = b;
            break;
        }
        case Chi2Mode::pearson:
            for (std::size_t i = 0; i < b; ++i) {
                const double d = h.counts[i] - h.expectations[i];
                sum.add(d * d / h.expectations[i]);
            }
            out.dof = b;
            break;
        case Chi2Mode::multinomial: {
            if (!h.probabilities || h.probabilities->size() != b) {
                throw PreconditionError("multinomial chi-square needs bin probabilities");
            }
            NeumaierSum psum;
            for (double p : *h.probabilities) {
                if (!(p > 0.0)) {
                    throw InvalidBinError("multinomial bin probability must be positive");
                }
                psum.add(p);
            }
            if (std::fabs(psum.value() - 1.0) > 1e-9) {
                throw PreconditionError("multinomial bin probabilities must sum to 1");
            }
            const double total = h.total();
            for (std::size_t i = 0; i < b; ++i) {
                const double expected = total * (*h.probabilities)[i];
                const double d = h.counts[i] - expected;
                sum.add(d * d / expected);
            }
            out.dof = b - 1;
            break;
        }
    }
    out.value = sum.value();
    return out;
}

std::size_t bin_count_rule(std::size_t n) {
    const double b = std::round(2.0 * std::pow(static_cast<double>(n), 0.4));
    return std::max<std::size_t>(1, static_cast<std::size_t>(b));
}

Histogram bin_uniform(const Sample& sample, const UnivariateHypothesis& h, std::size_t bins,
                      BinningPolicy policy) {
    if (bins == 0) {
        throw PreconditionError("bin count must be positive");
    }
    if (sample.dim() != 1) {
        throw DimensionError("bin_uniform needs a one-dimensional sample");
    }
    const double b = static_cast<double>(bins);
    std::vector<double> edges(bins + 1);
    edges.front() = h.lower();
    edges.back() = h.upper();
    if (policy == BinningPolicy::equal_width) {
        if (!h.bounded()) {
            throw PolicyError("equal-width binning needs a bounded support, " + h.identity() +
                              " is unbounded");
        }
        const double width = h.upper() - h.lower();
        for (std::size_t i = 1; i < bins; ++i) {
            edges[i] = h.lower() + width * (static_cast<double>(i) / b);
        }
    } else {
        for (std::size_t i = 1; i < bins; ++i) {
            edges[i] = h.quantile(static_cast<double>(i) / b);
        }
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) {
            throw PreconditionError("bin edges are not strictly increasing");
        }
    }

    Histogram hist;
    hist.counts.assign(bins, 0.0);
    for (double x : sample.coords()) {
        if (!h.contains(x)) {
            throw DomainError("observation outside support of " + h.identity());
        }
        hist.counts[locate(edges, x)] += 1.0;
    }

    const auto n = static_cast<double>(sample.size());
    std::vector<double> probs(bins);
    if (policy == BinningPolicy::equal_probability) {
        std::fill(probs.begin(), probs.end(), 1.0 / b);
    } else {
        for (std::size_t i = 0; i < bins; ++i) {
            const double lo = i == 0 ? 0.0 : std::clamp(h.cdf(edges[i]), 0.0, 1.0);
            const double hi = i + 1 == bins ? 1.0 : std::clamp(h.cdf(edges[i + 1]), 0.0, 1.0);
            probs[i] = hi - lo;
        }
    }
    hist.expectations.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        hist.expectations[i] = n * probs[i];
    }
    hist.probabilities = std::move(probs);
    hist.edges.push_back(std::move(edges));
    return hist;
}

Histogram bin_unit_grid(const Sample& z, std::size_t bins_per_axis) {
    if (bins_per_axis == 0) {
        throw PreconditionError("bin count must be positive");
    }
    const std::size_t d = z.dim();
    std::vector<double> axis_edges(bins_per_axis + 1);
    for (std::size_t i = 0; i <= bins_per_axis; ++i) {
        axis_edges[i] = static_cast<double>(i) / static_cast<double>(bins_per_axis);
    }

    std::size_t cells = 1;
    for (std::size_t k = 0; k < d; ++k) cells *= bins_per_axis;

    Histogram hist;
    hist.edges.assign(d, axis_edges);
    hist.counts.assign(cells, 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto p = z.point(i);
        std::size_t cell = 0;
        for (std::size_t k = 0; k < d; ++k) {
            if (!(p[k] >= 0.0 && p[k] <= 1.0)) {
                throw DomainError("grid binning needs coordinates in [0, 1]");
            }
            cell = cell * bins_per_axis + locate(axis_edges, p[k]);
        }
        hist.counts[cell] += 1.0;
    }
    const double prob = 1.0 / static_cast<double>(cells);
    hist.probabilities = std::vector<double>(cells, prob);
    hist.expectations.assign(cells, static_cast<double>(z.size()) * prob);
    return hist;
}

double chi2_asymptotic_pvalue(double value, std::size_t dof) {
    if (dof == 0) {
        throw PreconditionError("chi-square needs at least one degree of freedom");
    }
    if (value <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * value);
}

}  // namespace gof
