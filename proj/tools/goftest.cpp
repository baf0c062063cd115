// goftest: command-line front end for the goodness-of-fit toolkit.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gof/calibrate.hpp"
#include "gof/error.hpp"
#include "gof/eventfile.hpp"
#include "gof/outcome.hpp"
#include "gof/powerlab.hpp"
#include "gof/registry.hpp"
#include "gof/simd/kernels.hpp"
#include "gof/version.hpp"

namespace fs = std::filesystem;

namespace {

struct Shared {
    std::uint64_t seed = 1;
    std::size_t replicas = 1000;
    double alpha = 0.05;
    std::size_t jobs = 1;
    std::string cache_dir;
    std::string out;
};

struct StatFlags {
    std::string statistic;
    std::string kernel;
    std::string kappa;
    std::string s;
    std::string dmin;
    std::string k;
    std::string bins;
    std::string binning;
    std::string weights;
};

void add_shared(CLI::App* cmd, Shared& sh) {
    cmd->add_option("--seed", sh.seed, "master seed")->capture_default_str();
    cmd->add_option("--replicas", sh.replicas, "Monte Carlo replicas for the null distribution")
        ->capture_default_str();
    cmd->add_option("--alpha", sh.alpha, "significance level")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--jobs", sh.jobs, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--cache-dir", sh.cache_dir, "directory of cached null distributions");
    cmd->add_option("--out", sh.out, "output path");
}

void add_stat_flags(CLI::App* cmd, StatFlags& f) {
    cmd->add_option("--statistic", f.statistic, "statistic spec, e.g. ks or energy:kernel=log")
        ->required();
    cmd->add_option("--kernel", f.kernel, "energy kernel")
        ->check(CLI::IsMember({"power", "log", "gaussian"}));
    cmd->add_option("--kappa", f.kappa, "power kernel exponent");
    cmd->add_option("--s", f.s, "gaussian kernel width");
    cmd->add_option("--dmin", f.dmin, "distance cutoff");
    cmd->add_option("--k", f.k, "Neyman order");
    cmd->add_option("--bins", f.bins, "chi2 bin count");
    cmd->add_option("--binning", f.binning, "chi2 binning")->check(CLI::IsMember({"width", "prob"}));
    cmd->add_option("--weights", f.weights, "three-region weights")
        ->check(CLI::IsMember({"unit", "chi"}));
}

gof::StatisticSpec make_spec(const StatFlags& f) {
    gof::StatisticSpec spec = gof::StatisticSpec::parse(f.statistic);
    auto set = [&](const char* key, const std::string& v) {
        if (!v.empty()) spec.params[key] = v;
    };
    set("kernel", f.kernel);
    set("kappa", f.kappa);
    set("s", f.s);
    set("dmin", f.dmin);
    set("k", f.k);
    set("bins", f.bins);
    set("binning", f.binning);
    set("weights", f.weights);
    return spec;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void warn_resolution(const Shared& sh) {
    const std::size_t need = gof::minimum_replicas(sh.alpha);
    if (sh.replicas < need) {
        std::cerr << "warning: " << sh.replicas << " replicas are too few for p-values at alpha="
                  << sh.alpha << " (need at least " << need << ")\n";
    }
}

void write_record(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gof::Error("cannot write " + path);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    if (!out) throw gof::Error("cannot write " + path);
}

std::uint64_t null_seed(std::uint64_t seed) { return gof::derive_seed(seed, "null"); }

int cmd_test(const Shared& sh, const StatFlags& flags, const std::string& data_path,
             const std::string& hypothesis) {
    const gof::Sample data = gof::read_event_file(data_path);
    const gof::NullHypothesis h0 = gof::parse_hypothesis(hypothesis);
    if (data.dim() != h0.dim()) {
        throw gof::DimensionError(data_path + " has " + std::to_string(data.dim()) +
                                  " columns, hypothesis " + h0.identity + " has dimension " +
                                  std::to_string(h0.dim()));
    }
    const gof::Procedure proc = gof::bind_statistic(make_spec(flags), h0, data.size(), sh.seed);

    std::optional<gof::NullDistribution> null;
    bool hit = false;
    if (sh.replicas > 0) {
        warn_resolution(sh);
        std::optional<gof::NullCache> cache;
        if (!sh.cache_dir.empty()) cache.emplace(sh.cache_dir);
        null = gof::calibrate_procedure(proc, h0, data.size(), sh.replicas, null_seed(sh.seed),
                                        sh.jobs, cache ? &*cache : nullptr, &hit);
    }
    const gof::TestOutcome outcome =
        gof::evaluate_outcome(proc, data, null ? &*null : nullptr, sh.seed, sh.alpha);

    std::vector<std::pair<std::string, std::string>> kv = {
        {"command", "test"},
        {"version", gof::kVersion},
        {"data", data_path},
        {"hypothesis", h0.identity},
        {"statistic", proc.name},
        {"tail", std::string(gof::tail_name(proc.tail))},
        {"n", std::to_string(data.size())},
        {"dim", std::to_string(data.dim())},
        {"value", num(outcome.value)},
    };
    for (const auto& [k, v] : proc.settings) kv.emplace_back("setting." + k, v);
    if (proc.details) {
        gof::RandomStream rng(gof::derive_seed(sh.seed, "observed"), 0);
        for (const auto& [k, v] : proc.details(data, rng)) kv.emplace_back("detail." + k, num(v));
    }
    if (outcome.p_value) {
        kv.emplace_back("p_value", num(*outcome.p_value));
        kv.emplace_back("replicas", std::to_string(outcome.replicas));
        kv.emplace_back("alpha", num(sh.alpha));
        kv.emplace_back("reject", outcome.reject_at->reject ? "true" : "false");
        kv.emplace_back("config_digest", proc.digest());
    }
    kv.emplace_back("seed", std::to_string(sh.seed));

    std::cout << proc.name << " vs " << h0.identity << " (n=" << data.size() << ")\n";
    std::cout << "  value    " << num(outcome.value) << '\n';
    if (outcome.p_value) {
        std::cout << "  p-value  " << num(*outcome.p_value) << "  (" << outcome.replicas
                  << " replicas" << (hit ? ", cached" : "") << ")\n";
        std::cout << "  alpha    " << sh.alpha << ": "
                  << (outcome.reject_at->reject ? "reject H0" : "accept H0") << '\n';
    } else {
        std::cout << "  p-value  not computed (replicas=0)\n";
    }
    std::cout << "  seed     " << sh.seed << '\n';
    if (!sh.out.empty()) write_record(sh.out, kv);
    return 0;
}

int cmd_calibrate(const Shared& sh, const StatFlags& flags, const std::string& hypothesis,
                  std::size_t n) {
    warn_resolution(sh);
    if (sh.replicas == 0) throw gof::ResolutionError("calibration needs at least one replica");
    const gof::NullHypothesis h0 = gof::parse_hypothesis(hypothesis);
    const gof::Procedure proc = gof::bind_statistic(make_spec(flags), h0, n, sh.seed);
    const gof::NullCache cache(sh.cache_dir.empty() ? ".gof-cache" : sh.cache_dir);
    bool hit = false;
    const gof::NullDistribution dist =
        gof::calibrate_procedure(proc, h0, n, sh.replicas, null_seed(sh.seed), sh.jobs, &cache, &hit);
    const fs::path path = cache.path_for(dist.config_digest, dist.replicas, dist.seed);
    if (hit) {
        std::cout << "cache hit: " << path.string() << '\n';
    } else {
        std::cout << "wrote " << path.string() << '\n';
    }
    std::cout << "  " << proc.name << " vs " << h0.identity << " n=" << n << " replicas=" << dist.replicas
              << " digest=" << dist.config_digest << '\n';
    if (!sh.out.empty()) {
        std::ofstream out(sh.out, std::ios::binary);
        if (!out) throw gof::Error("cannot write " + sh.out);
        gof::write_null(out, dist);
    }
    return 0;
}

int cmd_power(const Shared& sh, const CLI::App& app, const std::string& config_path,
              const std::string& chart_dir) {
    gof::StudyConfig cfg = gof::StudyConfig::load(config_path);
    if (app.count("--seed")) cfg.options.seed = sh.seed;
    if (app.count("--replicas")) cfg.options.replicas = sh.replicas;
    if (app.count("--alpha")) cfg.options.alpha = sh.alpha;
    if (app.count("--jobs")) cfg.options.jobs = sh.jobs;
    std::optional<gof::NullCache> cache;
    if (!sh.cache_dir.empty()) cache.emplace(sh.cache_dir);
    const gof::PowerTable table = gof::run_study(cfg, cache ? &*cache : nullptr);

    if (sh.out.empty()) {
        gof::write_power_table(std::cout, table);
    } else {
        std::ofstream out(sh.out, std::ios::binary);
        if (!out) throw gof::Error("cannot write " + sh.out);
        gof::write_power_table(out, table);
        std::cout << "wrote " << sh.out << " (" << table.rows.size() << " rows)\n";
    }

    const std::string dir = !chart_dir.empty() ? chart_dir
                            : !sh.out.empty()  ? fs::path(sh.out).parent_path().string()
                                               : std::string();
    if (!dir.empty() || !chart_dir.empty()) {
        const std::string stem = sh.out.empty() ? "power" : fs::path(sh.out).stem().string();
        std::vector<std::string> models;
        for (const auto& r : table.rows) {
            if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
        }
        for (const auto& m : models) {
            // Charts are best effort.
            const fs::path path = fs::path(dir.empty() ? "." : dir) / (stem + "-" + m + ".svg");
            std::ofstream svg(path, std::ios::binary);
            if (!svg) {
                std::cerr << "warning: cannot write chart " << path.string() << '\n';
                continue;
            }
            gof::write_power_chart(svg, table, m);
        }
    }
    for (const auto& r : table.rows) {
        if (r.status != "ok") std::cerr << "warning: " << r.statistic << "/" << r.model << ": " << r.status << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"goodness-of-fit tests with Monte Carlo calibration", "goftest"};
    app.set_version_flag("--version", gof::kVersion);
    app.require_subcommand(1);
    std::string isa;
    app.add_option("--isa", isa, "force a kernel set (scalar, avx2)");

    Shared test_sh, cal_sh, pow_sh;
    StatFlags test_flags, cal_flags;
    std::string data_path, hypothesis = "uniform01", cal_hypothesis = "uniform01";
    std::string config_path, chart_dir;
    std::size_t cal_n = 0;

    CLI::App* test = app.add_subcommand("test", "test a data file against a hypothesis");
    add_shared(test, test_sh);
    add_stat_flags(test, test_flags);
    test->add_option("--data", data_path, "event file")->required();
    test->add_option("--hypothesis", hypothesis, "null hypothesis")->capture_default_str();

    CLI::App* calibrate = app.add_subcommand("calibrate", "build and cache a null distribution");
    add_shared(calibrate, cal_sh);
    add_stat_flags(calibrate, cal_flags);
    calibrate->add_option("--hypothesis", cal_hypothesis, "null hypothesis")->capture_default_str();
    calibrate->add_option("--n", cal_n, "sample size")->required()->check(CLI::PositiveNumber);

    CLI::App* power = app.add_subcommand("power", "run a power study");
    add_shared(power, pow_sh);
    power->add_option("--config", config_path, "study config")->required();
    power->add_option("--chart-dir", chart_dir, "directory for SVG charts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!isa.empty()) {
            if (isa == "scalar") {
                gof::simd::set_active_isa(gof::simd::Isa::scalar);
            } else if (isa == "avx2") {
                gof::simd::set_active_isa(gof::simd::Isa::avx2);
            } else {
                throw gof::PreconditionError("unknown --isa '" + isa + "'");
            }
        }
        if (*test) return cmd_test(test_sh, test_flags, data_path, hypothesis);
        if (*calibrate) return cmd_calibrate(cal_sh, cal_flags, cal_hypothesis, cal_n);
        return cmd_power(pow_sh, *power, config_path, chart_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
