#pragma once

// Named statistics and hypotheses: the string forms used by the CLI and by
// study configurations, and their binding into calibratable procedures.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gof/calibrate.hpp"
#include "gof/hypothesis.hpp"
#include "gof/sample.hpp"

namespace gof {

// "name" or "name:key=value:key=value".
struct StatisticSpec {
    std::string name;
    std::map<std::string, std::string> params;

    static StatisticSpec parse(std::string_view text);
    // Name followed by the parameters in key order.
    std::string canonical() const;
};

// Names accepted by bind_statistic.
const std::vector<std::string>& statistic_names();

// Null hypothesis as seen by the procedures: every hypothesis can draw
// samples; analytic one-dimensional ones also expose cdf and quantile.
struct NullHypothesis {
    std::string identity;
    std::optional<UnivariateHypothesis> univariate;
    MultivariateHypothesis multivariate;

    std::size_t dim() const { return multivariate.dim(); }
    Sample draw(RandomStream& rng, std::size_t n) const { return multivariate.sample(rng, n); }
};

NullHypothesis make_null(const UnivariateHypothesis& h);
NullHypothesis make_null(const MultivariateHypothesis& h);

// uniform01 | exp(rate) | gauss1d(mu,sigma) | gauss2d | gauss2d(mx,my,vxx,vxy,vyy)
// | sample:<path>. Throws ParseError.
NullHypothesis parse_hypothesis(std::string_view text);

// A statistic bound to a hypothesis and sample size, ready for calibration.
struct Procedure {
    std::string name;      // canonical statistic spec
    std::string identity;  // everything the null distribution depends on
    Tail tail = Tail::upper;
    std::size_t dim = 1;
    StatisticFn evaluate;
    // Resolved parameters worth reporting (defaults filled in).
    std::vector<std::pair<std::string, std::string>> settings;
    // Extra per-sample quantities for reports (e.g. phi1 and phi2).
    std::function<std::vector<std::pair<std::string, double>>(const Sample&, RandomStream&)> details;

    std::string digest() const { return config_digest(identity); }
};

// Throws PreconditionError for an unknown name (message lists the known
// ones), an unknown parameter, or a statistic that does not fit the
// hypothesis. `seed` fixes the simulation sample of the energy test.
Procedure bind_statistic(const StatisticSpec& spec, const NullHypothesis& h, std::size_t n,
                         std::uint64_t seed);

}  // namespace gof
