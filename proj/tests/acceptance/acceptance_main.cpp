// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//
//   acceptance [--only N] [--goftest PATH]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/special_functions/gamma.hpp>

#include "gof/binned.hpp"
#include "gof/calibrate.hpp"
#include "gof/edf.hpp"
#include "gof/eventfile.hpp"
#include "gof/hypothesis.hpp"
#include "gof/powerlab.hpp"
#include "gof/random.hpp"
#include "gof/region3.hpp"
#include "gof/registry.hpp"
#include "oracles.hpp"

#ifndef GOFTEST_PATH
#define GOFTEST_PATH "goftest"
#endif

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr double kAlpha = 0.05;

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, std::string note) {
        if (!ok) pass = false;
        notes.push_back((ok ? "  ok   " : "  FAIL ") + std::move(note));
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

// Pooled two-proportion z for p1 > p2.
double two_proportion_z(double p1, double p2, std::size_t n1, std::size_t n2) {
    const double pooled = (p1 * n1 + p2 * n2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    if (se == 0.0) return 0.0;
    return (p1 - p2) / se;
}

// ---------------------------------------------------------------- 1

Verdict oracle_equivalence() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    gof::RandomStream rng(kSeed, 1);
    double worst = 0.0;
    std::size_t region_mismatch = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng.below(200);
        std::vector<double> z(n);
        for (auto& x : z) x = rng.uniform();
        std::sort(z.begin(), z.end());

        const auto got = gof::edf_statistics(z);
        const auto want = oracle::edf(z);
        for (auto [g, w] : {std::pair{got.sup.d_plus, want.d_plus}, {got.sup.d_minus, want.d_minus},
                            {got.sup.d, want.d}, {got.sup.v, want.v}, {got.quad.w2, want.w2},
                            {got.quad.a2, want.a2}, {got.quad.u2, want.u2}}) {
            worst = std::max(worst, rel_err(g, w));
        }
        for (bool chi : {false, true}) {
            const auto r = gof::three_region_statistic(
                z, chi ? gof::RegionWeights::inverse_expectation : gof::RegionWeights::unit);
            if (r.value != oracle::region_brute_force(z, chi, 3)) ++region_mismatch;
        }
    }
    const double elapsed = seconds_since(t0);
    v.check(worst <= 1e-8, fmt("EDF statistics, worst relative error %.3g (limit 1e-8)", worst));
    v.check(region_mismatch == 0, fmt("three-region vs exhaustive scan, %zu mismatches of 400", region_mismatch));
    v.check(elapsed < 60.0, fmt("runtime %.1f s (limit 60 s)", elapsed));
    return v;
}

// ---------------------------------------------------------------- 2 and 7

struct NullCase {
    std::string hypothesis;
    std::string statistic;
    std::size_t n;
    std::size_t trials;
    std::size_t replicas;
};

// Rejection rate under H0 and the first 1000 p-values of the same trials.
struct SizeRun {
    NullCase c;
    double size = 0.0;
    double sigma = 0.0;
    double uniform_ks = 0.0;  // sqrt(1000) D
    double seconds = 0.0;
};

std::vector<NullCase> null_cases() {
    std::vector<NullCase> out;
    for (const char* s : {"dplus", "dminus", "ks", "kuiper", "cvm", "ad", "watson", "chi2",
                          "chi2:mode=multinomial", "neyman", "region3", "region3:weights=chi"}) {
        out.push_back({"uniform01", s, 100, 10000, 40000});
    }
    for (const char* s : {"mardia_b1", "mardia_b2", "neyman_mv", "chi2"}) {
        out.push_back({"gauss2d", s, 200, 10000, 40000});
    }
    for (const char* s : {"energy:kernel=log", "energy:kernel=power", "energy:kernel=gaussian"}) {
        out.push_back({"gauss2d", s, 200, 2000, 10000});
    }
    return out;
}

SizeRun run_size(const NullCase& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto h0 = gof::parse_hypothesis(c.hypothesis);
    const auto proc = gof::bind_statistic(gof::StatisticSpec::parse(c.statistic), h0, c.n, kSeed);
    const auto null = gof::calibrate_procedure(proc, h0, c.n, c.replicas,
                                               gof::derive_seed(kSeed, "null"), 1);
    const auto model = gof::contamination_model(h0.dim() == 1 ? "A:fraction=0" : "blob:fraction=0", h0.dim());
    gof::PowerOptions opt;
    opt.alpha = kAlpha;
    opt.trials = c.trials;
    opt.replicas = c.replicas;
    opt.seed = kSeed;
    std::vector<double> p;
    const auto row = gof::estimate_power(proc, h0, model, c.n, null, opt, &p);

    SizeRun r;
    r.c = c;
    r.size = row.power;
    r.sigma = std::sqrt(kAlpha * (1.0 - kAlpha) / static_cast<double>(c.trials));
    p.resize(1000);
    std::sort(p.begin(), p.end());
    r.uniform_ks = std::sqrt(1000.0) * oracle::ks_distance(p, [](double u) { return u; });
    r.seconds = seconds_since(t0);
    return r;
}

Verdict size_calibration(const std::vector<SizeRun>& runs) {
    Verdict v;
    for (const auto& r : runs) {
        const double z = (r.size - kAlpha) / r.sigma;
        v.check(std::abs(z) <= 3.0,
                fmt("%-9s %-24s n=%-3zu size %.4f (%+.2f sigma over %zu trials, R=%zu, %.0f s)",
                    r.c.hypothesis.c_str(), r.c.statistic.c_str(), r.c.n, r.size, z, r.c.trials,
                    r.c.replicas, r.seconds));
    }
    return v;
}

Verdict p_value_uniformity(const std::vector<SizeRun>& runs) {
    Verdict v;
    for (const auto& r : runs) {
        v.check(r.uniform_ks < oracle::kKs1PercentScaled,
                fmt("%-9s %-24s sqrt(1000) D = %.3f (1%% critical %.4f)", r.c.hypothesis.c_str(),
                    r.c.statistic.c_str(), r.uniform_ks, oracle::kKs1PercentScaled));
    }
    return v;
}

// ---------------------------------------------------------------- 3

Verdict asymptotic_consistency() {
    Verdict v;
    constexpr std::size_t kReplicas = 20000;
    struct Case {
        const char* statistic;
        std::size_t n;
        double dof;
    };
    for (const Case c : {Case{"chi2:bins=13:mode=multinomial", 10000, 12.0}, Case{"neyman:k=2", 1000, 2.0}}) {
        const auto h0 = gof::parse_hypothesis("uniform01");
        const auto proc = gof::bind_statistic(gof::StatisticSpec::parse(c.statistic), h0, c.n, kSeed);
        const auto null = gof::calibrate_procedure(proc, h0, c.n, kReplicas, gof::derive_seed(kSeed, "asymptotic"), 1);
        const double d = oracle::ks_distance(null.values, [&](double x) {
            return x <= 0.0 ? 0.0 : boost::math::gamma_p(c.dof / 2.0, x / 2.0);
        });
        v.check(d < 0.02, fmt("%-30s n=%-5zu vs chi2(%g): KS distance %.4f over %zu replicas (limit 0.02)",
                              c.statistic, c.n, c.dof, d, kReplicas));
    }
    return v;
}

// ---------------------------------------------------------------- 4

struct Claim {
    std::string better;
    std::string worse;
};

struct PowerSetup {
    std::string hypothesis;
    std::string model;  // with its declared fraction
    std::size_t n;
    std::size_t trials;
    std::size_t replicas;
    std::vector<Claim> claims;
};

Verdict directional_power() {
    Verdict v;
    const std::vector<PowerSetup> setups{
        {"uniform01", "A:fraction=0.15", 100, 2000, 10000,
         {{"ks", "chi2"}, {"ad", "chi2"}, {"neyman", "chi2"}}},
        {"uniform01", "B:fraction=0.3", 100, 2000, 10000, {{"kuiper", "ks"}, {"watson", "ks"}}},
        {"gauss2d", "blob:fraction=0.1", 200, 1000, 4000, {{"energy:kernel=log", "mardia_b1"}}},
    };
    for (const auto& s : setups) {
        const auto h0 = gof::parse_hypothesis(s.hypothesis);
        const auto model = gof::contamination_model(s.model, h0.dim());
        gof::PowerOptions opt;
        opt.alpha = kAlpha;
        opt.trials = s.trials;
        opt.replicas = s.replicas;
        opt.seed = kSeed;
        std::map<std::string, double> power;
        auto power_of = [&](const std::string& stat) {
            if (auto it = power.find(stat); it != power.end()) return it->second;
            const auto proc = gof::bind_statistic(gof::StatisticSpec::parse(stat), h0, s.n, kSeed);
            const auto null = gof::calibrate_procedure(proc, h0, s.n, s.replicas, gof::derive_seed(kSeed, "null"), 1);
            return power[stat] = gof::estimate_power(proc, h0, model, s.n, null, opt).power;
        };
        for (const auto& c : s.claims) {
            const double a = power_of(c.better);
            const double b = power_of(c.worse);
            const double z = two_proportion_z(a, b, s.trials, s.trials);
            v.check(z > 2.0, fmt("%-18s n=%zu: %s %.3f vs %s %.3f, z = %.2f (%zu trials)", s.model.c_str(),
                                 s.n, c.better.c_str(), a, c.worse.c_str(), b, z, s.trials));
        }
    }
    return v;
}

// ---------------------------------------------------------------- 5

Verdict distorted_sample() {
    Verdict v;
    constexpr std::size_t n = 200;
    const auto h0 = gof::parse_hypothesis("gauss2d");
    const auto proc = gof::bind_statistic(gof::StatisticSpec::parse("energy:kernel=log"), h0, n, kSeed);
    const auto null = gof::calibrate_procedure(proc, h0, n, 1000, gof::derive_seed(kSeed, "null"), 1);

    // Gaussian draw with a quadratic bend of the second coordinate.
    gof::RandomStream rng(gof::derive_seed(kSeed, "distorted"), 0);
    const auto base = h0.draw(rng, n);
    std::vector<double> xy(base.coords().begin(), base.coords().end());
    for (std::size_t i = 0; i < n; ++i) xy[2 * i + 1] += 0.8 * (xy[2 * i] * xy[2 * i] - 1.0);
    const gof::Sample data(2, xy);

    gof::RandomStream aux(gof::derive_seed(kSeed, "observed"), 0);
    const double phi = proc.evaluate(data, aux);
    const double p = gof::p_value(null, phi, proc.tail);
    v.check(p == 1.0 / 1001.0, fmt("phi = %.5g, largest of 1000 replicas %.5g, p = %.6f (want 1/1001)", phi,
                                   null.values.back(), p));
    return v;
}

// ---------------------------------------------------------------- 6

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs the CLI inside `cwd` with stdout and stderr captured to `log`.
int run_cli(const std::string& goftest, const fs::path& cwd, const std::string& args, const fs::path& log) {
    const std::string cmd = "cd \"" + cwd.string() + "\" && \"" + goftest + "\" " + args + " > \"" +
                            log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

Verdict cli_determinism(const std::string& goftest) {
    Verdict v;
    const fs::path dir = fs::temp_directory_path() / fmt("gof-acceptance-%d", static_cast<int>(::getpid()));
    fs::remove_all(dir);

    // Two identical working directories; every command runs once in each.
    gof::RandomStream rng(kSeed, 6);
    const auto u = gof::parse_hypothesis("uniform01").draw(rng, 80);
    const auto g = gof::parse_hypothesis("gauss2d").draw(rng, 60);
    const fs::path runs[2] = {dir / "a", dir / "b"};
    for (const auto& r : runs) {
        fs::create_directories(r);
        gof::write_event_file(r / "u.txt", u);
        gof::write_event_file(r / "g.txt", g);
        std::ofstream cfg(r / "study.cfg");
        cfg << "hypothesis = uniform01\nstatistics = ks ad region3\nmodels = A C\nn = 50\n"
               "trials = 400\nreplicas = 200\nseed = 9\n";
    }

    struct Cmd {
        std::string label;
        std::string args;
    };
    const std::vector<Cmd> cmds{
        {"test ks", "test --data u.txt --statistic ks --replicas 500 --seed 4 --out out-ks"},
        {"test energy", "test --data g.txt --hypothesis gauss2d --statistic energy --kernel log --replicas 200 "
                        "--seed 4 --out out-energy"},
        {"calibrate", "calibrate --statistic region3 --n 60 --replicas 300 --seed 5 --cache-dir cache --out out-null"},
        {"power", "power --config study.cfg --out out-power.tsv"},
    };
    for (const auto& c : cmds) {
        std::string outs[2];
        std::string logs[2];
        bool ran = true;
        const std::string out_name = c.args.substr(c.args.rfind(' ') + 1);
        for (int k = 0; k < 2; ++k) {
            if (run_cli(goftest, runs[k], c.args, runs[k] / "log") != 0) ran = false;
            outs[k] = slurp(runs[k] / out_name);
            logs[k] = slurp(runs[k] / "log");
        }
        v.check(ran && !outs[0].empty() && outs[0] == outs[1] && logs[0] == logs[1],
                fmt("%-12s rerun byte-identical (output %zu bytes)", c.label.c_str(), outs[0].size()));
    }

    std::vector<std::string> nulls;
    for (int jobs : {1, 2, 8}) {
        const std::string args = fmt("calibrate --hypothesis gauss2d --statistic mardia_b1 --n 100 --replicas 400 "
                                     "--seed 7 --jobs %d --cache-dir jobs-%d --out null-%d",
                                     jobs, jobs, jobs);
        const int rc = run_cli(goftest, runs[0], args, runs[0] / "log");
        nulls.push_back(rc == 0 ? slurp(runs[0] / fmt("null-%d", jobs)) : "");
    }
    v.check(!nulls[0].empty() && nulls[0] == nulls[1] && nulls[0] == nulls[2],
            "calibrate output identical for --jobs 1, 2, 8");
    fs::remove_all(dir);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    std::string goftest = GOFTEST_PATH;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--only") {
            only = std::atoi(argv[i + 1]);
        } else if (key == "--goftest") {
            goftest = argv[i + 1];
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N] [--goftest PATH]\n");
            return 2;
        }
    }
    auto wanted = [&](int id) { return only == 0 || only == id; };

    // Criteria 2 and 7 share the same H0 trials.
    std::vector<SizeRun> size_runs;
    auto sizes = [&]() -> const std::vector<SizeRun>& {
        if (size_runs.empty()) {
            for (const auto& c : null_cases()) size_runs.push_back(run_size(c));
        }
        return size_runs;
    };

    struct Criterion {
        int id;
        const char* title;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence},
        {2, "size at alpha = 0.05", [&] { return size_calibration(sizes()); }},
        {3, "asymptotic null distributions", asymptotic_consistency},
        {4, "directional power", directional_power},
        {5, "distorted 2-D sample beyond all replicas", distorted_sample},
        {6, "CLI determinism", [&] { return cli_determinism(goftest); }},
        {7, "p-value uniformity", [&] { return p_value_uniformity(sizes()); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!wanted(c.id)) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.check(false, std::string("exception: ") + e.what());
        }
        std::printf("[%s] %d %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title);
        for (const auto& n : v.notes) std::printf("%s\n", n.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
