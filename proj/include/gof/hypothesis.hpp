#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "gof/random.hpp"
#include "gof/sample.hpp"

namespace gof {

// Simple univariate null hypothesis: cdf, sampler and support [lower, upper]
// (either end may be infinite). The quantile function is optional and only
// needed for equal-probability binning.
class UnivariateHypothesis {
public:
    using Cdf = std::function<double(double)>;
    using Quantile = std::function<double(double)>;
    using Sampler = std::function<double(RandomStream&)>;

    UnivariateHypothesis(std::string identity, Cdf cdf, Sampler sampler, double lower,
                         double upper, Quantile quantile = {});

    const std::string& identity() const { return identity_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    bool bounded() const;
    bool contains(double x) const { return x >= lower_ && x <= upper_; }

    // Raw cdf value, unchecked.
    double cdf(double x) const { return cdf_(x); }
    bool has_quantile() const { return static_cast<bool>(quantile_); }
    double quantile(double p) const;

    double draw(RandomStream& rng) const { return sampler_(rng); }
    Sample sample(RandomStream& rng, std::size_t n) const;

private:
    std::string identity_;
    Cdf cdf_;
    Sampler sampler_;
    double lower_;
    double upper_;
    Quantile quantile_;
};

UnivariateHypothesis uniform01();
UnivariateHypothesis exponential(double rate);
UnivariateHypothesis gaussian1d(double mean, double sigma);

// Probability integral transform Z = F(X).
//
// Throws DimensionError for dim != 1, DomainError for a point outside the
// support and HypothesisError when the cdf leaves [0, 1] by more than
// rounding slack; values within the slack are clamped.
Sample pit(const Sample& sample, const UnivariateHypothesis& h);

// Multivariate normal N(mean, cov) with a cached Cholesky factor.
class GaussianModel {
public:
    GaussianModel(Eigen::VectorXd mean, Eigen::MatrixXd cov);
    static GaussianModel standard(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    // out = mean + L z with z standard normal.
    void draw(RandomStream& rng, std::span<double> out) const;
    // L^{-1} (x - mean) for every point; the result has identity covariance under H0.
    Sample whiten(const Sample& sample) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd chol_;
    Eigen::MatrixXd chol_inv_;
};

// Null hypothesis known only through a sampler, optionally carrying a fixed
// reference sample (pre-drawn simulation points) and Gaussian parameters.
class MultivariateHypothesis {
public:
    using Sampler = std::function<Sample(RandomStream&, std::size_t)>;

    MultivariateHypothesis(std::string identity, std::size_t dim, Sampler sampler,
                           std::optional<Sample> reference = std::nullopt,
                           std::optional<GaussianModel> gaussian = std::nullopt);

    const std::string& identity() const { return identity_; }
    std::size_t dim() const { return dim_; }
    Sample sample(RandomStream& rng, std::size_t n) const;
    const std::optional<Sample>& reference() const { return reference_; }
    const std::optional<GaussianModel>& gaussian() const { return gaussian_; }

private:
    std::string identity_;
    std::size_t dim_;
    Sampler sampler_;
    std::optional<Sample> reference_;
    std::optional<GaussianModel> gaussian_;
};

MultivariateHypothesis gaussian_hypothesis(GaussianModel model);
MultivariateHypothesis as_multivariate(const UnivariateHypothesis& h);

// Empirical hypothesis from a simulation sample. Even rows become the fixed
// reference, odd rows the pool that pseudo-data are drawn from (without
// replacement), so pseudo-data never coincide with reference points.
MultivariateHypothesis empirical_hypothesis(std::string identity, const Sample& simulation);

}  // namespace gof
