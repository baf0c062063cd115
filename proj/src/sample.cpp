#include "gof/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gof/error.hpp"

namespace gof {

Sample::Sample(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) {
        throw PreconditionError("sample dimension must be positive");
    }
    if (coords_.empty()) {
        throw PreconditionError("sample must contain at least one point");
    }
    if (coords_.size() % dim_ != 0) {
        throw PreconditionError("coordinate count " + std::to_string(coords_.size()) +
                                " is not a multiple of dimension " + std::to_string(dim_));
    }
    for (double c : coords_) {
        if (!std::isfinite(c)) {
            throw PreconditionError("sample coordinates must be finite");
        }
    }
}

std::vector<double> Sample::column(std::size_t axis) const {
    if (axis >= dim_) {
        throw DimensionError("axis " + std::to_string(axis) + " out of range for dimension " +
                             std::to_string(dim_));
    }
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = coords_[i * dim_ + axis];
    }
    return out;
}

std::vector<double> order_statistic(const Sample& sample) {
    if (sample.dim() != 1) {
        throw DimensionError("order statistic needs a one-dimensional sample, got dim " +
                             std::to_string(sample.dim()));
    }
    std::vector<double> sorted(sample.coords().begin(), sample.coords().end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

Sample marginal(const Sample& sample, std::size_t axis) {
    return Sample::univariate(sample.column(axis));
}

}  // namespace gof
