#pragma once

#include <cstddef>

#include "gof/hypothesis.hpp"
#include "gof/sample.hpp"
#include "gof/smooth.hpp"

namespace gof {

// Mardia's multivariate skewness and kurtosis,
//   b1 = (1/n^2) sum_{i,j} ((x_i - mu)' S^-1 (x_j - mu))^3
//   b2 = (1/n)   sum_i     ((x_i - mu)' S^-1 (x_i - mu))^2
struct MardiaStats {
    double b1 = 0.0;
    double b2 = 0.0;
};

// mu and S taken from the simple hypothesis H0. Throws DimensionError for
// dim < 2 or a model of another dimension.
MardiaStats mardia_statistics(const Sample& sample, const GaussianModel& h0);

// mu and S estimated from the sample (maximum likelihood, divisor n). Throws
// NumericError when the sample covariance is singular.
MardiaStats mardia_statistics_estimated(const Sample& sample);

// Number of tensor-product terms pi_a1(u_1)...pi_ad(u_d) with
// 1 <= a_1 + ... + a_d <= k; the asymptotic chi^2 degrees of freedom.
std::size_t neyman_multivariate_terms(std::size_t dim, std::size_t k);

// Whitens with the H0 covariance, maps each coordinate through the standard
// normal cdf and sums the squared tensor-product Legendre components up to
// total degree k, divided by n.
double neyman_multivariate(const Sample& sample, const GaussianModel& h0, const SmoothConfig& cfg);

}  // namespace gof
