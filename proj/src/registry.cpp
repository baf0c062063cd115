#include "gof/registry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "gof/binned.hpp"
#include "gof/edf.hpp"
#include "gof/energy.hpp"
#include "gof/error.hpp"
#include "gof/eventfile.hpp"
#include "gof/multinormal.hpp"
#include "gof/outcome.hpp"
#include "gof/region3.hpp"
#include "gof/smooth.hpp"

namespace gof {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(v)) {
        throw ParseError("invalid number '" + text + "' for " + what);
    }
    return v;
}

std::size_t parse_size(const std::string& text, const std::string& what) {
    const double v = parse_double(text, what);
    if (v < 0 || v != std::floor(v)) {
        throw ParseError("invalid count '" + text + "' for " + what);
    }
    return static_cast<std::size_t>(v);
}

// Parameter access that remembers which keys were consumed.
class Params {
public:
    Params(const StatisticSpec& spec) : spec_(spec) {}

    std::optional<std::string> get(const std::string& key) {
        used_.insert(key);
        const auto it = spec_.params.find(key);
        if (it == spec_.params.end()) return std::nullopt;
        return it->second;
    }
    std::string choice(const std::string& key, const std::string& fallback,
                       std::initializer_list<std::string_view> allowed) {
        const std::string v = get(key).value_or(fallback);
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string msg = "invalid " + key + "='" + v + "' for " + spec_.name + " (allowed:";
            for (auto a : allowed) msg += " " + std::string(a);
            throw PreconditionError(msg + ")");
        }
        return v;
    }
    std::optional<double> number(const std::string& key) {
        const auto v = get(key);
        if (!v || *v == "auto") return std::nullopt;
        return parse_double(*v, spec_.name + " " + key);
    }
    std::optional<std::size_t> count(const std::string& key) {
        const auto v = get(key);
        if (!v || *v == "auto") return std::nullopt;
        return parse_size(*v, spec_.name + " " + key);
    }
    void finish() const {
        for (const auto& [key, value] : spec_.params) {
            if (!used_.count(key)) {
                throw PreconditionError("unknown parameter '" + key + "' for statistic " +
                                        spec_.name);
            }
        }
    }

private:
    const StatisticSpec& spec_;
    std::set<std::string> used_;
};

const UnivariateHypothesis& need_univariate(const NullHypothesis& h, const std::string& stat) {
    if (!h.univariate) {
        throw PreconditionError("statistic " + stat +
                                " needs an analytic one-dimensional hypothesis, got " + h.identity);
    }
    return *h.univariate;
}

const GaussianModel& need_gaussian(const NullHypothesis& h, const std::string& stat) {
    if (!h.multivariate.gaussian()) {
        throw PreconditionError("statistic " + stat + " needs a Gaussian hypothesis, got " +
                                h.identity + " (unsupported)");
    }
    return *h.multivariate.gaussian();
}

std::vector<double> sorted_pit(const Sample& s, const UnivariateHypothesis& h) {
    return order_statistic(pit(s, h));
}

// Moments of a reference sample as a Gaussian model used for standardizing.
GaussianModel moment_model(const Sample& ref) {
    const auto d = static_cast<Eigen::Index>(ref.dim());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        for (Eigen::Index k = 0; k < d; ++k) mean[k] += ref.point(i)[static_cast<std::size_t>(k)];
    }
    mean /= static_cast<double>(ref.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd x(d);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
            x[k] = ref.point(i)[static_cast<std::size_t>(k)] - mean[k];
        }
        cov += x * x.transpose();
    }
    cov /= static_cast<double>(ref.size() - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();
    return GaussianModel(mean, cov);
}

Procedure bind_edf(const std::string& name, const NullHypothesis& h) {
    const UnivariateHypothesis uni = need_univariate(h, name);
    Procedure p;
    p.dim = 1;
    auto sup = [uni](const Sample& s) { return supremum_stats(sorted_pit(s, uni)); };
    auto quad = [uni](const Sample& s) { return quadratic_stats(sorted_pit(s, uni)); };
    if (name == "dplus") {
        p.evaluate = [sup](const Sample& s, RandomStream&) { return sup(s).d_plus; };
    } else if (name == "dminus") {
        p.evaluate = [sup](const Sample& s, RandomStream&) { return sup(s).d_minus; };
    } else if (name == "ks") {
        p.evaluate = [sup](const Sample& s, RandomStream&) { return sup(s).d; };
    } else if (name == "kuiper") {
        p.evaluate = [sup](const Sample& s, RandomStream&) { return sup(s).v; };
    } else if (name == "cvm") {
        p.evaluate = [quad](const Sample& s, RandomStream&) { return quad(s).w2; };
    } else if (name == "ad") {
        p.evaluate = [quad](const Sample& s, RandomStream&) { return quad(s).a2; };
        p.details = [quad](const Sample& s, RandomStream&) {
            return std::vector<std::pair<std::string, double>>{
                {"a2_clamped", quad(s).a2_clamped ? 1.0 : 0.0}};
        };
    } else {
        p.evaluate = [quad](const Sample& s, RandomStream&) { return quad(s).u2; };
    }
    return p;
}

Procedure bind_chi2(Params& params, const NullHypothesis& h, std::size_t n) {
    const std::string mode_name = params.choice("mode", "pearson", {"pearson", "multinomial"});
    const Chi2Mode mode = mode_name == "pearson" ? Chi2Mode::pearson : Chi2Mode::multinomial;
    const auto bins_opt = params.count("bins");
    const std::string binning = params.choice("binning", "prob", {"prob", "width"});

    Procedure p;
    p.dim = h.dim();
    if (h.dim() == 1 && h.univariate) {
        const UnivariateHypothesis uni = *h.univariate;
        const std::size_t bins = bins_opt.value_or(bin_count_rule(n));
        const BinningPolicy policy =
            binning == "prob" ? BinningPolicy::equal_probability : BinningPolicy::equal_width;
        p.evaluate = [uni, bins, policy, mode](const Sample& s, RandomStream&) {
            return chi2_statistic(bin_uniform(s, uni, bins, policy), mode).value;
        };
        p.settings = {{"bins", std::to_string(bins)}, {"binning", binning}, {"mode", mode_name}};
        return p;
    }
    const GaussianModel model = need_gaussian(h, "chi2");
    if (binning != "prob") {
        throw PolicyError("multivariate chi2 supports equal-probability grids only");
    }
    const std::size_t per_axis = bins_opt.value_or(std::max<std::size_t>(
        2, static_cast<std::size_t>(std::lround(
               std::pow(static_cast<double>(bin_count_rule(n)), 1.0 / static_cast<double>(h.dim()))))));
    p.evaluate = [model, per_axis, mode](const Sample& s, RandomStream&) {
        const Sample y = model.whiten(s);
        std::vector<double> u(y.coords().size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = 0.5 * std::erfc(-y.coords()[i] / std::numbers::sqrt2);
        }
        return chi2_statistic(bin_unit_grid(Sample(y.dim(), std::move(u)), per_axis), mode).value;
    };
    p.settings = {{"bins_per_axis", std::to_string(per_axis)}, {"binning", "prob"}, {"mode", mode_name}};
    return p;
}

Procedure bind_energy(Params& params, const NullHypothesis& h, std::size_t n, std::uint64_t seed) {
    const std::string family_name = params.choice("kernel", "log", {"power", "log", "gaussian"});
    const auto kappa = params.number("kappa");
    const auto s_opt = params.number("s");
    const auto dmin_opt = params.number("dmin");
    const std::size_t m = params.count("m").value_or(default_sim_size(n));
    const std::string protocol = params.choice("sim", "fixed", {"fixed", "fresh"});
    if (m < 2) throw PreconditionError("energy test needs m >= 2 simulation points");

    // Standardize by the H0 covariance when known, else by the reference moments.
    std::optional<GaussianModel> frame = h.multivariate.gaussian();
    std::string frame_name = frame ? "h0-covariance" : "none";
    if (!frame && h.multivariate.reference() && h.multivariate.reference()->size() > h.dim()) {
        frame = moment_model(*h.multivariate.reference());
        frame_name = "reference-moments";
    }
    auto standardize = [frame](const Sample& s) { return frame ? frame->whiten(s) : s; };

    const Sample sim = standardize(fixed_simulation_sample(h.multivariate, m, seed));

    Kernel kernel;
    if (family_name == "power") {
        kernel = Kernel::power(kappa.value_or(kDefaultKappa), dmin_opt ? *dmin_opt : default_d_min(sim));
    } else if (family_name == "log") {
        kernel = Kernel::log(dmin_opt ? *dmin_opt : default_d_min(sim));
    } else {
        kernel = Kernel::gaussian(s_opt ? *s_opt : default_gaussian_s(sim), dmin_opt.value_or(0.0));
    }
    kernel.validate();

    Procedure p;
    p.dim = h.dim();
    p.settings = {{"kernel", family_name},
                  {"m", std::to_string(protocol == "fixed" ? sim.size() : m)},
                  {"sim", protocol},
                  {"standardize", frame_name},
                  {"d_min", format_double(kernel.d_min)}};
    if (kernel.family == KernelFamily::power) p.settings.emplace_back("kappa", format_double(kernel.kappa));
    if (kernel.family == KernelFamily::gaussian) p.settings.emplace_back("s", format_double(kernel.s));

    if (protocol == "fixed") {
        auto scorer = std::make_shared<const EnergyScorer>(sim, kernel);
        p.evaluate = [scorer, standardize](const Sample& s, RandomStream&) {
            return scorer->score(standardize(s)).phi;
        };
        p.details = [scorer, standardize](const Sample& s, RandomStream&) {
            const auto v = scorer->score(standardize(s));
            return std::vector<std::pair<std::string, double>>{{"phi1", v.phi1}, {"phi2", v.phi2}};
        };
        p.settings.emplace_back("sim_seed", std::to_string(seed));
    } else {
        const MultivariateHypothesis mh = h.multivariate;
        auto fresh = [mh, m, kernel, standardize](const Sample& s, RandomStream& rng) {
            return energy_statistic(standardize(s), standardize(mh.sample(rng, m)), kernel);
        };
        p.evaluate = [fresh](const Sample& s, RandomStream& rng) { return fresh(s, rng).phi; };
        p.details = [fresh](const Sample& s, RandomStream& rng) {
            const auto v = fresh(s, rng);
            return std::vector<std::pair<std::string, double>>{{"phi1", v.phi1}, {"phi2", v.phi2}};
        };
    }
    return p;
}

}  // namespace

StatisticSpec StatisticSpec::parse(std::string_view text) {
    StatisticSpec spec;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
        const auto next = text.find(':', pos);
        const std::string part = trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (first) {
            if (part.empty()) throw ParseError("empty statistic name");
            spec.name = part;
            first = false;
        } else {
            const auto eq = part.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw ParseError("statistic parameter '" + part + "' is not key=value");
            }
            spec.params[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
        }
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return spec;
}

std::string StatisticSpec::canonical() const {
    std::string out = name;
    for (const auto& [k, v] : params) out += ":" + k + "=" + v;
    return out;
}

const std::vector<std::string>& statistic_names() {
    static const std::vector<std::string> names = {
        "dplus", "dminus", "ks",     "kuiper",    "cvm",       "ad",        "watson",
        "chi2",  "neyman", "region3", "energy",   "mardia_b1", "mardia_b2", "neyman_mv"};
    return names;
}

NullHypothesis make_null(const UnivariateHypothesis& h) {
    return NullHypothesis{h.identity(), h, as_multivariate(h)};
}

NullHypothesis make_null(const MultivariateHypothesis& h) {
    return NullHypothesis{h.identity(), std::nullopt, h};
}

NullHypothesis parse_hypothesis(std::string_view raw) {
    const std::string text = trim(raw);
    if (text.rfind("sample:", 0) == 0) {
        const std::string path = text.substr(7);
        const Sample ref = read_event_file(path);
        std::ostringstream content;
        content.precision(17);
        content << ref.dim();
        for (double c : ref.coords()) content << ',' << c;
        return make_null(
            empirical_hypothesis("sample:" + config_digest(content.str()), ref));
    }

    std::string name = text;
    std::vector<double> args;
    if (const auto open = text.find('('); open != std::string::npos) {
        if (text.back() != ')') throw ParseError("unbalanced parentheses in hypothesis '" + text + "'");
        name = trim(text.substr(0, open));
        std::string inner = text.substr(open + 1, text.size() - open - 2);
        std::replace(inner.begin(), inner.end(), ';', ',');
        std::istringstream is(inner);
        std::string tok;
        while (std::getline(is, tok, ',')) args.push_back(parse_double(trim(tok), "hypothesis " + name));
    }

    if (name == "uniform01" && args.empty()) return make_null(uniform01());
    if (name == "exp" && args.size() == 1) return make_null(exponential(args[0]));
    if (name == "gauss1d" && args.size() == 2) {
        const UnivariateHypothesis uni = gaussian1d(args[0], args[1]);
        Eigen::VectorXd mean(1);
        mean << args[0];
        Eigen::MatrixXd cov(1, 1);
        cov << args[1] * args[1];
        const GaussianModel model(mean, cov);
        return NullHypothesis{uni.identity(), uni,
                              MultivariateHypothesis(uni.identity(), 1,
                                                     [uni](RandomStream& rng, std::size_t n) {
                                                         return uni.sample(rng, n);
                                                     },
                                                     std::nullopt, model)};
    }
    if (name == "gauss2d" && (args.empty() || args.size() == 5)) {
        if (args.empty()) return make_null(gaussian_hypothesis(GaussianModel::standard(2)));
        Eigen::VectorXd mean(2);
        mean << args[0], args[1];
        Eigen::MatrixXd cov(2, 2);
        cov << args[2], args[3], args[3], args[4];
        return make_null(gaussian_hypothesis(GaussianModel(mean, cov)));
    }
    throw ParseError("unknown hypothesis '" + text +
                     "' (expected uniform01, exp(rate), gauss1d(mu,sigma), gauss2d, "
                     "gauss2d(mx,my,vxx,vxy,vyy) or sample:<path>)");
}

Procedure bind_statistic(const StatisticSpec& spec, const NullHypothesis& h, std::size_t n,
                         std::uint64_t seed) {
    const auto& names = statistic_names();
    if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
        std::string msg = "unknown statistic '" + spec.name + "'; available:";
        for (const auto& s : names) msg += " " + s;
        throw PreconditionError(msg);
    }
    if (n == 0) throw PreconditionError("sample size must be positive");

    Params params(spec);
    Procedure p;
    const std::string& name = spec.name;
    if (name == "dplus" || name == "dminus" || name == "ks" || name == "kuiper" || name == "cvm" ||
        name == "ad" || name == "watson") {
        p = bind_edf(name, h);
    } else if (name == "chi2") {
        p = bind_chi2(params, h, n);
    } else if (name == "neyman") {
        const UnivariateHypothesis uni = need_univariate(h, name);
        const SmoothConfig cfg(params.count("k").value_or(2));
        p.evaluate = [uni, cfg](const Sample& s, RandomStream&) {
            return neyman_statistic(pit(s, uni).coords(), cfg);
        };
        p.settings = {{"k", std::to_string(cfg.k())}};
    } else if (name == "region3") {
        const UnivariateHypothesis uni = need_univariate(h, name);
        const std::string w = params.choice("weights", "unit", {"unit", "chi"});
        const std::size_t regions = params.count("regions").value_or(3);
        const RegionWeights weights = w == "unit" ? RegionWeights::unit : RegionWeights::inverse_expectation;
        if (regions < 3 || regions > 5) throw PreconditionError("regions must be 3, 4 or 5");
        p.evaluate = [uni, weights, regions](const Sample& s, RandomStream&) {
            return region_statistic(sorted_pit(s, uni), weights, regions).value;
        };
        p.details = [uni, weights, regions](const Sample& s, RandomStream&) {
            const auto r = region_statistic(sorted_pit(s, uni), weights, regions);
            std::vector<std::pair<std::string, double>> out;
            for (std::size_t i = 0; i < r.split.cuts.size(); ++i) {
                out.emplace_back("cut" + std::to_string(i + 1), r.split.cuts[i]);
            }
            return out;
        };
        p.settings = {{"weights", w}, {"regions", std::to_string(regions)}};
    } else if (name == "energy") {
        p = bind_energy(params, h, n, seed);
    } else if (name == "mardia_b1" || name == "mardia_b2") {
        const std::string mode = params.choice("mode", "known", {"known", "sample"});
        if (h.dim() < 2) throw DimensionError("Mardia statistics need dim >= 2");
        const bool skew = name == "mardia_b1";
        if (mode == "known") {
            const GaussianModel model = need_gaussian(h, name);
            p.evaluate = [model, skew](const Sample& s, RandomStream&) {
                const auto m = mardia_statistics(s, model);
                return skew ? m.b1 : m.b2;
            };
        } else {
            p.evaluate = [skew](const Sample& s, RandomStream&) {
                const auto m = mardia_statistics_estimated(s);
                return skew ? m.b1 : m.b2;
            };
        }
        p.tail = skew ? Tail::upper : Tail::two_sided;
        p.settings = {{"mode", mode}};
    } else if (name == "neyman_mv") {
        const GaussianModel model = need_gaussian(h, name);
        const SmoothConfig cfg(params.count("k").value_or(2));
        p.evaluate = [model, cfg](const Sample& s, RandomStream&) {
            return neyman_multivariate(s, model, cfg);
        };
        p.settings = {{"k", std::to_string(cfg.k())},
                      {"terms", std::to_string(neyman_multivariate_terms(h.dim(), cfg.k()))}};
    }
    params.finish();

    p.name = spec.canonical();
    p.dim = h.dim();
    std::string identity = p.name + "|h=" + h.identity + "|n=" + std::to_string(n) +
                           "|tail=" + std::string(tail_name(p.tail));
    for (const auto& [k, v] : p.settings) identity += "|" + k + "=" + v;
    p.identity = identity;
    return p;
}

TestOutcome evaluate_outcome(const Procedure& proc, const Sample& data,
                             const NullDistribution* null, std::uint64_t seed,
                             std::optional<double> alpha) {
    if (data.dim() != proc.dim) {
        throw DimensionError("data has dimension " + std::to_string(data.dim()) +
                             ", hypothesis has dimension " + std::to_string(proc.dim));
    }
    RandomStream rng(derive_seed(seed, "observed"), 0);
    TestOutcome out;
    out.statistic_name = proc.name;
    out.value = proc.evaluate(data, rng);
    out.seed = seed;
    if (null != nullptr) {
        out.replicas = null->replicas;
        out.p_value = p_value(*null, out.value, proc.tail);
        if (alpha) {
            out.reject_at = Decision{*alpha, *out.p_value <= *alpha};
        }
    }
    return out;
}

}  // namespace gof
