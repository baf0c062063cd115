#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gof {

// An ordered collection of n points with `dim` finite coordinates each,
// stored row-major.
class Sample {
public:
    // Throws PreconditionError on dim == 0, empty data, a size that is not a
    // multiple of dim, or a non-finite coordinate.
    Sample(std::size_t dim, std::vector<double> coords);

    static Sample univariate(std::vector<double> values) { return Sample(1, std::move(values)); }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / dim_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<const double> coords() const { return coords_; }

    // Coordinate `axis` of every point.
    std::vector<double> column(std::size_t axis) const;

    bool operator==(const Sample&) const = default;

private:
    std::size_t dim_;
    std::vector<double> coords_;
};

// Sample values of a one-dimensional sample in non-decreasing order; ties
// are kept. Throws DimensionError when dim != 1.
std::vector<double> order_statistic(const Sample& sample);

// One coordinate of a multivariate sample as a univariate sample.
Sample marginal(const Sample& sample, std::size_t axis);

}  // namespace gof
