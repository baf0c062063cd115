#include "gof/powerlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "gof/error.hpp"
#include "gof/version.hpp"

namespace gof {

namespace {

constexpr double kUnivariateFraction = 0.3;
constexpr double kMultivariateFraction = 0.2;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

// Symmetric triangular density on [center - half, center + half].
double triangular(RandomStream& rng, double center, double half) {
    return center + half * (rng.uniform() + rng.uniform() - 1.0);
}

ContaminationModel univariate_model(const std::string& name) {
    ContaminationModel m;
    m.name = name;
    m.frame = ContaminationModel::Frame::probability;
    m.dim = 1;
    m.fraction = kUnivariateFraction;
    if (name == "A") {
        m.formula = "u ~ U(0, 0.5)";
        m.background = [](RandomStream& rng, std::span<double> out) { out[0] = 0.5 * rng.uniform(); };
    } else if (name == "B") {
        m.formula = "u ~ 0.5 Tri(0, 0.15, 0.3) + 0.5 Tri(0.7, 0.85, 1)";
        m.background = [](RandomStream& rng, std::span<double> out) {
            const double center = rng.uniform() < 0.5 ? 0.15 : 0.85;
            out[0] = triangular(rng, center, 0.15);
        };
    } else {
        m.formula = "u ~ Tri(0.3, 0.5, 0.7)";
        m.background = [](RandomStream& rng, std::span<double> out) {
            out[0] = triangular(rng, 0.5, 0.2);
        };
    }
    return m;
}

ContaminationModel multivariate_model(const std::string& name, std::size_t dim) {
    if (dim < 2) throw PreconditionError("contamination model " + name + " needs dim >= 2");
    ContaminationModel m;
    m.name = name;
    m.frame = ContaminationModel::Frame::whitened;
    m.dim = dim;
    m.fraction = kMultivariateFraction;
    if (name == "blob") {
        m.formula = "y ~ N(1, 0.3^2 I)";
        m.background = [](RandomStream& rng, std::span<double> out) {
            for (double& v : out) v = 1.0 + 0.3 * rng.normal();
        };
    } else if (name == "ring") {
        m.formula = "y = r w, w uniform on the unit sphere, r ~ N(2, 0.1^2)";
        m.background = [](RandomStream& rng, std::span<double> out) {
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (double& v : out) {
                    v = rng.normal();
                    norm2 += v * v;
                }
            } while (norm2 == 0.0);
            const double r = 2.0 + 0.1 * rng.normal();
            const double scale = r / std::sqrt(norm2);
            for (double& v : out) v *= scale;
        };
    } else {
        m.formula = "y ~ N(0, 0.1 I + 0.95 J)";
        // 0.1 I + 0.95 J = 0.1 I + 0.95 * 1 1^T: independent part plus a shared component.
        m.background = [](RandomStream& rng, std::span<double> out) {
            const double shared = std::sqrt(0.95) * rng.normal();
            for (double& v : out) v = std::sqrt(0.1) * rng.normal() + shared;
        };
    }
    return m;
}

}  // namespace

const std::vector<std::string>& contamination_names() {
    static const std::vector<std::string> names = {"A", "B", "C", "blob", "ring", "diagonal"};
    return names;
}

ContaminationModel contamination_model(std::string_view raw, std::size_t dim) {
    const StatisticSpec spec = StatisticSpec::parse(raw);
    const auto& names = contamination_names();
    if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
        std::string msg = "unknown contamination model '" + spec.name + "'; available:";
        for (const auto& s : names) msg += " " + s;
        throw PreconditionError(msg);
    }
    ContaminationModel m = (spec.name == "A" || spec.name == "B" || spec.name == "C")
                               ? univariate_model(spec.name)
                               : multivariate_model(spec.name, dim);
    for (const auto& [key, value] : spec.params) {
        if (key != "fraction") {
            throw PreconditionError("unknown parameter '" + key + "' for model " + spec.name);
        }
        char* end = nullptr;
        const double f = std::strtod(value.c_str(), &end);
        if (value.empty() || *end != '\0' || !(f >= 0.0 && f <= 1.0)) {
            throw PreconditionError("fraction must lie in [0, 1], got '" + value + "'");
        }
        m.fraction = f;
    }
    return m;
}

Sample draw_contaminated(const NullHypothesis& h0, const ContaminationModel& model, std::size_t n,
                         RandomStream& rng) {
    const std::size_t d = h0.dim();
    if (model.dim != d) {
        throw PreconditionError("contamination model " + model.name + " has dimension " +
                                std::to_string(model.dim) + ", hypothesis " + h0.identity +
                                " has dimension " + std::to_string(d));
    }
    std::optional<Eigen::MatrixXd> chol;
    const GaussianModel* gauss = nullptr;
    if (model.frame == ContaminationModel::Frame::probability) {
        if (!h0.univariate || !h0.univariate->has_quantile()) {
            throw PreconditionError("model " + model.name +
                                    " needs a one-dimensional hypothesis with a quantile");
        }
    } else {
        if (!h0.multivariate.gaussian()) {
            throw PreconditionError("model " + model.name + " needs a Gaussian hypothesis");
        }
        gauss = &*h0.multivariate.gaussian();
        chol = Eigen::MatrixXd(gauss->cov().llt().matrixL());
    }

    std::vector<double> coords(n * d);
    std::vector<double> y(d);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<double> out(coords.data() + i * d, d);
        if (rng.uniform() < model.fraction) {
            model.background(rng, y);
            if (gauss == nullptr) {
                out[0] = h0.univariate->quantile(y[0]);
            } else {
                const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(d));
                const Eigen::VectorXd x = gauss->mean() + *chol * yv;
                for (std::size_t k = 0; k < d; ++k) out[k] = x[static_cast<Eigen::Index>(k)];
            }
        } else {
            const Sample one = h0.draw(rng, 1);
            std::copy(one.coords().begin(), one.coords().end(), out.begin());
        }
    }
    return Sample(d, std::move(coords));
}

std::uint64_t trial_seed(std::uint64_t seed, const ContaminationModel& model, std::size_t n) {
    std::uint64_t s = derive_seed(seed, "power-trials");
    s = derive_seed(s, model.name);
    s = derive_seed(s, fmt("%.17g", model.fraction));
    return derive_seed(s, static_cast<std::uint64_t>(n));
}

NullDistribution calibrate_procedure(const Procedure& proc, const NullHypothesis& h0,
                                     std::size_t n, std::size_t replicas, std::uint64_t seed,
                                     std::size_t jobs, const NullCache* cache, bool* cache_hit) {
    const std::string digest = proc.digest();
    if (cache_hit != nullptr) *cache_hit = false;
    if (cache != nullptr) {
        if (auto hit = cache->load(digest, replicas, seed)) {
            if (cache_hit != nullptr) *cache_hit = true;
            return *hit;
        }
    }
    NullDistribution dist = build_null(
        proc.name, digest, proc.evaluate,
        [&h0](RandomStream& rng, std::size_t m) { return h0.draw(rng, m); }, n, replicas, seed, jobs);
    if (cache != nullptr) cache->store(dist);
    return dist;
}

PowerRow estimate_power(const Procedure& proc, const NullHypothesis& h0,
                        const ContaminationModel& model, std::size_t n,
                        const NullDistribution& null, const PowerOptions& options,
                        std::vector<double>* p_values) {
    if (options.trials < 400 && !options.allow_few_trials) {
        throw PreconditionError("power estimation needs at least 400 trials");
    }
    if (null.replicas < minimum_replicas(options.alpha)) {
        throw ResolutionError("null distribution has " + std::to_string(null.replicas) +
                              " replicas, level " + fmt("%g", options.alpha) + " needs " +
                              std::to_string(minimum_replicas(options.alpha)));
    }
    const std::uint64_t seed = trial_seed(options.seed, model, n);
    std::vector<double> p(options.trials);
    parallel_for(options.trials, options.jobs, [&](std::size_t t) {
        RandomStream rng(seed, t);
        const Sample s = draw_contaminated(h0, model, n, rng);
        p[t] = p_value(null, proc.evaluate(s, rng), proc.tail);
    });
    std::size_t rejected = 0;
    for (double v : p) rejected += v <= options.alpha ? 1 : 0;

    PowerRow row;
    row.statistic = proc.name;
    row.model = model.name;
    row.fraction = model.fraction;
    row.n = n;
    row.alpha = options.alpha;
    row.trials = options.trials;
    row.replicas = null.replicas;
    row.power = static_cast<double>(rejected) / static_cast<double>(options.trials);
    row.sigma = std::sqrt(row.power * (1.0 - row.power) / static_cast<double>(options.trials));
    if (p_values != nullptr) *p_values = std::move(p);
    return row;
}

StudyConfig StudyConfig::parse(std::istream& is, std::string_view source) {
    StudyConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError(std::string(source) + ":" + std::to_string(lineno) + ": " + msg);
    };
    auto number = [&](const std::string& text) {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (text.empty() || *end != '\0' || !std::isfinite(v)) fail("invalid number '" + text + "'");
        return v;
    };
    auto count = [&](const std::string& text) {
        const double v = number(text);
        if (v < 0 || v != std::floor(v)) fail("invalid count '" + text + "'");
        return static_cast<std::size_t>(v);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "hypothesis") {
            cfg.hypothesis = value;
        } else if (key == "statistics") {
            cfg.statistics = split_list(value);
        } else if (key == "models") {
            cfg.models = split_list(value);
        } else if (key == "fractions") {
            cfg.fractions.clear();
            for (const auto& f : split_list(value)) cfg.fractions.push_back(number(f));
        } else if (key == "n") {
            cfg.sizes.clear();
            for (const auto& f : split_list(value)) cfg.sizes.push_back(count(f));
        } else if (key == "alpha") {
            cfg.options.alpha = number(value);
        } else if (key == "trials") {
            cfg.options.trials = count(value);
        } else if (key == "replicas") {
            cfg.options.replicas = count(value);
        } else if (key == "seed") {
            char* end = nullptr;
            cfg.options.seed = std::strtoull(value.c_str(), &end, 10);
            if (value.empty() || *end != '\0') fail("invalid seed '" + value + "'");
        } else if (key == "jobs") {
            cfg.options.jobs = std::max<std::size_t>(1, count(value));
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (cfg.statistics.empty()) throw ParseError(std::string(source) + ": no statistics given");
    if (cfg.models.empty()) throw ParseError(std::string(source) + ": no models given");
    if (cfg.sizes.empty()) throw ParseError(std::string(source) + ": no sample sizes given");
    return cfg;
}

StudyConfig StudyConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open study config " + path.string());
    return parse(in, path.string());
}

PowerTable run_study(const StudyConfig& config, const NullCache* cache) {
    const NullHypothesis h0 = parse_hypothesis(config.hypothesis);
    const PowerOptions& opt = config.options;

    PowerTable table;
    table.header.push_back("gof power table v1");
    table.header.push_back(std::string("version=") + kVersion +
                           " seed=" + std::to_string(opt.seed) + " hypothesis=" + h0.identity +
                           " alpha=" + fmt("%g", opt.alpha) +
                           " trials=" + std::to_string(opt.trials) +
                           " replicas=" + std::to_string(opt.replicas));

    std::vector<ContaminationModel> models;
    std::map<std::string, std::string> formulas;
    for (const auto& spec : config.models) {
        const ContaminationModel base = contamination_model(spec, h0.dim());
        formulas[base.name] = base.formula;
        if (config.fractions.empty()) {
            models.push_back(base);
        } else {
            for (double f : config.fractions) {
                ContaminationModel m = base;
                m.fraction = f;
                models.push_back(m);
            }
        }
    }
    for (const auto& [name, formula] : formulas) {
        table.header.push_back("model " + name + ": " + formula +
                               (h0.dim() == 1 ? ", x = F0^-1(u)" : ", x = mean + L y"));
    }

    const std::uint64_t null_seed = derive_seed(opt.seed, "null");
    for (const auto& stat_text : config.statistics) {
        for (std::size_t n : config.sizes) {
            std::optional<Procedure> proc;
            std::optional<NullDistribution> null;
            std::string failure;
            try {
                proc = bind_statistic(StatisticSpec::parse(stat_text), h0, n, opt.seed);
                null = calibrate_procedure(*proc, h0, n, opt.replicas, null_seed, opt.jobs, cache);
            } catch (const std::exception& e) {
                failure = e.what();
            }
            for (const auto& model : models) {
                PowerRow row;
                row.statistic = proc ? proc->name : stat_text;
                row.model = model.name;
                row.fraction = model.fraction;
                row.n = n;
                row.alpha = opt.alpha;
                row.trials = opt.trials;
                row.replicas = opt.replicas;
                if (!failure.empty()) {
                    row.power = row.sigma = std::nan("");
                    row.status = "error: " + failure;
                } else {
                    try {
                        row = estimate_power(*proc, h0, model, n, *null, opt);
                    } catch (const std::exception& e) {
                        row.power = row.sigma = std::nan("");
                        row.status = std::string("error: ") + e.what();
                    }
                }
                table.rows.push_back(row);
            }
        }
    }
    return table;
}

void write_power_table(std::ostream& os, const PowerTable& table) {
    for (const auto& h : table.header) os << "# " << h << '\n';
    os << "statistic\tmodel\tfraction\tn\talpha\tpower\tsigma\ttrials\treplicas\tstatus\n";
    for (const auto& r : table.rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), '\t', ' ');
        std::replace(status.begin(), status.end(), '\n', ' ');
        os << r.statistic << '\t' << r.model << '\t' << fmt("%g", r.fraction) << '\t' << r.n
           << '\t' << fmt("%g", r.alpha) << '\t' << fmt("%.6f", r.power) << '\t'
           << fmt("%.6f", r.sigma) << '\t' << r.trials << '\t' << r.replicas << '\t' << status
           << '\n';
    }
}

void write_power_chart(std::ostream& os, const PowerTable& table, std::string_view model) {
    std::vector<const PowerRow*> rows;
    for (const auto& r : table.rows) {
        if (r.model == model) rows.push_back(&r);
    }
    const double bar = 36.0;
    const double gap = 14.0;
    const double left = 50.0;
    const double top = 30.0;
    const double height = 240.0;
    const double width = left + static_cast<double>(rows.size()) * (bar + gap) + gap;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", width)
       << "\" height=\"" << fmt("%.0f", top + height + 90) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">power, model " << model << "</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double y = top + height * (1.0 - tick / 4.0);
        os << "<line x1=\"" << left - 4 << "\" x2=\"" << fmt("%.1f", width) << "\" y1=\"" << fmt("%.1f", y)
           << "\" y2=\"" << fmt("%.1f", y) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << fmt("%.1f", y + 4)
           << "\" text-anchor=\"end\">" << fmt("%.2f", tick / 4.0) << "</text>\n";
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const PowerRow& r = *rows[i];
        const double x = left + gap + static_cast<double>(i) * (bar + gap);
        const double p = std::isfinite(r.power) ? r.power : 0.0;
        const double h = height * p;
        os << "<rect x=\"" << fmt("%.1f", x) << "\" y=\"" << fmt("%.1f", top + height - h)
           << "\" width=\"" << bar << "\" height=\"" << fmt("%.1f", h) << "\" fill=\"#4a78b0\"/>\n";
        os << "<text transform=\"translate(" << fmt("%.1f", x + bar / 2) << ","
           << fmt("%.1f", top + height + 12) << ") rotate(40)\">" << r.statistic << " f="
           << fmt("%g", r.fraction) << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace gof
