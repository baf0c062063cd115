#include "gof/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "gof/error.hpp"

namespace gof {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCdfSlack = 1e-12;

std::string format_param(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

UnivariateHypothesis::UnivariateHypothesis(std::string identity, Cdf cdf, Sampler sampler,
                                           double lower, double upper, Quantile quantile)
    : identity_(std::move(identity)),
      cdf_(std::move(cdf)),
      sampler_(std::move(sampler)),
      lower_(lower),
      upper_(upper),
      quantile_(std::move(quantile)) {
    if (!(lower_ < upper_)) {
        throw PreconditionError("hypothesis support must satisfy lower < upper");
    }
}

bool UnivariateHypothesis::bounded() const {
    return std::isfinite(lower_) && std::isfinite(upper_);
}

double UnivariateHypothesis::quantile(double p) const {
    if (!quantile_) {
        throw PreconditionError("hypothesis " + identity_ + " has no quantile function");
    }
    return quantile_(p);
}

Sample UnivariateHypothesis::sample(RandomStream& rng, std::size_t n) const {
    std::vector<double> values(n);
    for (auto& v : values) {
        v = sampler_(rng);
    }
    return Sample::univariate(std::move(values));
}

UnivariateHypothesis uniform01() {
    return UnivariateHypothesis(
        "uniform01", [](double x) { return std::clamp(x, 0.0, 1.0); },
        [](RandomStream& rng) { return rng.uniform(); }, 0.0, 1.0, [](double p) { return p; });
}

UnivariateHypothesis exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw PreconditionError("exponential rate must be positive");
    }
    return UnivariateHypothesis(
        "exp(" + format_param(rate) + ")",
        [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); },
        [rate](RandomStream& rng) { return rng.exponential(rate); }, 0.0, kInf,
        [rate](double p) { return p >= 1.0 ? kInf : -std::log1p(-p) / rate; });
}

UnivariateHypothesis gaussian1d(double mean, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mean)) {
        throw PreconditionError("gaussian sigma must be positive and finite");
    }
    return UnivariateHypothesis(
        "gauss1d(" + format_param(mean) + "," + format_param(sigma) + ")",
        [mean, sigma](double x) {
            return 0.5 * std::erfc(-(x - mean) / (sigma * std::numbers::sqrt2));
        },
        [mean, sigma](RandomStream& rng) { return mean + sigma * rng.normal(); }, -kInf, kInf,
        [mean, sigma](double p) {
            if (p <= 0.0) return -kInf;
            if (p >= 1.0) return kInf;
            return mean - sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
        });
}

Sample pit(const Sample& sample, const UnivariateHypothesis& h) {
    if (sample.dim() != 1) {
        throw DimensionError("PIT needs a one-dimensional sample");
    }
    std::vector<double> z(sample.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double x = sample.coords()[i];
        if (!h.contains(x)) {
            std::ostringstream msg;
            msg << "observation " << x << " outside support of " << h.identity();
            throw DomainError(msg.str());
        }
        const double c = h.cdf(x);
        if (!(c >= -kCdfSlack && c <= 1.0 + kCdfSlack)) {
            std::ostringstream msg;
            msg << "cdf of " << h.identity() << " returned " << c << " at " << x;
            throw HypothesisError(msg.str());
        }
        z[i] = std::clamp(c, 0.0, 1.0);
    }
    return Sample::univariate(std::move(z));
}

GaussianModel::GaussianModel(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() == 0 || cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw DimensionError("gaussian mean and covariance dimensions disagree");
    }
    if (!cov_.isApprox(cov_.transpose())) {
        throw PreconditionError("covariance must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov_);
    if (llt.info() != Eigen::Success) {
        throw NumericError("covariance is not positive definite");
    }
    chol_ = llt.matrixL();
    chol_inv_ = chol_.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(mean_.size(), mean_.size()));
}

GaussianModel GaussianModel::standard(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return GaussianModel(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
}

void GaussianModel::draw(RandomStream& rng, std::span<double> out) const {
    const auto d = mean_.size();
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        z[k] = rng.normal();
    }
    const Eigen::VectorXd x = mean_ + chol_ * z;
    for (Eigen::Index k = 0; k < d; ++k) {
        out[static_cast<std::size_t>(k)] = x[k];
    }
}

Sample GaussianModel::whiten(const Sample& sample) const {
    if (sample.dim() != dim()) {
        throw DimensionError("sample dimension does not match gaussian model");
    }
    const auto d = mean_.size();
    std::vector<double> out(sample.coords().size());
    Eigen::VectorXd x(d);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto p = sample.point(i);
        for (Eigen::Index k = 0; k < d; ++k) {
            x[k] = p[static_cast<std::size_t>(k)] - mean_[k];
        }
        const Eigen::VectorXd y = chol_inv_ * x;
        for (Eigen::Index k = 0; k < d; ++k) {
            out[i * dim() + static_cast<std::size_t>(k)] = y[k];
        }
    }
    return Sample(dim(), std::move(out));
}

MultivariateHypothesis::MultivariateHypothesis(std::string identity, std::size_t dim,
                                               Sampler sampler, std::optional<Sample> reference,
                                               std::optional<GaussianModel> gaussian)
    : identity_(std::move(identity)),
      dim_(dim),
      sampler_(std::move(sampler)),
      reference_(std::move(reference)),
      gaussian_(std::move(gaussian)) {
    if (dim_ == 0) {
        throw PreconditionError("hypothesis dimension must be positive");
    }
    if (reference_ && reference_->dim() != dim_) {
        throw DimensionError("reference sample dimension does not match hypothesis");
    }
    if (gaussian_ && gaussian_->dim() != dim_) {
        throw DimensionError("gaussian model dimension does not match hypothesis");
    }
}

Sample MultivariateHypothesis::sample(RandomStream& rng, std::size_t n) const {
    Sample s = sampler_(rng, n);
    if (s.dim() != dim_ || s.size() != n) {
        throw Error("sampler of " + identity_ + " returned a sample of the wrong shape");
    }
    return s;
}

MultivariateHypothesis gaussian_hypothesis(GaussianModel model) {
    std::ostringstream id;
    id.precision(17);
    id << "gauss" << model.dim() << "d(";
    for (Eigen::Index k = 0; k < model.mean().size(); ++k) {
        id << (k ? "," : "") << model.mean()[k];
    }
    id << ";";
    for (Eigen::Index r = 0; r < model.cov().rows(); ++r) {
        for (Eigen::Index c = 0; c < model.cov().cols(); ++c) {
            id << ((r || c) ? "," : "") << model.cov()(r, c);
        }
    }
    id << ")";
    const std::size_t dim = model.dim();
    auto sampler = [model, dim](RandomStream& rng, std::size_t n) {
        std::vector<double> coords(n * dim);
        for (std::size_t i = 0; i < n; ++i) {
            model.draw(rng, std::span<double>(coords.data() + i * dim, dim));
        }
        return Sample(dim, std::move(coords));
    };
    return MultivariateHypothesis(id.str(), dim, std::move(sampler), std::nullopt, model);
}

MultivariateHypothesis as_multivariate(const UnivariateHypothesis& h) {
    return MultivariateHypothesis(h.identity(), 1,
                                  [h](RandomStream& rng, std::size_t n) { return h.sample(rng, n); });
}

MultivariateHypothesis empirical_hypothesis(std::string identity, const Sample& simulation) {
    if (simulation.size() < 2) {
        throw PreconditionError("empirical hypothesis needs at least two simulation points");
    }
    const std::size_t dim = simulation.dim();
    std::vector<double> reference;
    std::vector<double> pool;
    for (std::size_t i = 0; i < simulation.size(); ++i) {
        auto& target = (i % 2 == 0) ? reference : pool;
        const auto p = simulation.point(i);
        target.insert(target.end(), p.begin(), p.end());
    }
    auto pool_sample = std::make_shared<const Sample>(dim, std::move(pool));
    auto sampler = [pool_sample, dim](RandomStream& rng, std::size_t n) {
        const std::size_t available = pool_sample->size();
        if (n > available) {
            throw PreconditionError("empirical hypothesis pool has " + std::to_string(available) +
                                    " points, cannot draw " + std::to_string(n));
        }
        // Partial Fisher-Yates over the pool indices.
        std::vector<std::size_t> index(available);
        for (std::size_t i = 0; i < available; ++i) index[i] = i;
        std::vector<double> coords;
        coords.reserve(n * dim);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(available - i));
            std::swap(index[i], index[j]);
            const auto p = pool_sample->point(index[i]);
            coords.insert(coords.end(), p.begin(), p.end());
        }
        return Sample(dim, std::move(coords));
    };
    return MultivariateHypothesis(std::move(identity), dim, std::move(sampler),
                                  Sample(dim, std::move(reference)));
}

}  // namespace gof
