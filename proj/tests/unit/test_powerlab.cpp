#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gof/error.hpp"
#include "gof/powerlab.hpp"

namespace {

gof::PowerOptions opts(std::size_t trials, std::uint64_t seed = 1) {
    gof::PowerOptions o;
    o.trials = trials;
    o.replicas = 1000;
    o.seed = seed;
    o.allow_few_trials = trials < 400;
    return o;
}

gof::PowerRow power_of(const std::string& stat, const std::string& hyp, const std::string& model,
                       std::size_t n, const gof::PowerOptions& o) {
    const auto h0 = gof::parse_hypothesis(hyp);
    const auto proc = gof::bind_statistic(gof::StatisticSpec::parse(stat), h0, n, o.seed);
    const auto null = gof::calibrate_procedure(proc, h0, n, o.replicas, gof::derive_seed(o.seed, "null"), 1);
    return gof::estimate_power(proc, h0, gof::contamination_model(model, h0.dim()), n, null, o);
}

TEST(Contamination, ModelsAndFractions) {
    EXPECT_EQ(gof::contamination_model("A", 1).fraction, 0.3);
    EXPECT_EQ(gof::contamination_model("blob", 2).fraction, 0.2);
    EXPECT_EQ(gof::contamination_model("C:fraction=0.45", 1).fraction, 0.45);
    EXPECT_THROW(gof::contamination_model("A:fraction=1.5", 1), gof::PreconditionError);
    EXPECT_THROW(gof::contamination_model("Z", 1), gof::PreconditionError);
    EXPECT_THROW(gof::contamination_model("ring", 1), gof::PreconditionError);
    for (const auto& name : gof::contamination_names()) {
        const auto m = gof::contamination_model(name, 2);
        EXPECT_FALSE(m.formula.empty()) << name;
    }
}

TEST(Contamination, BackgroundShapes) {
    const auto h0 = gof::parse_hypothesis("uniform01");
    gof::RandomStream rng(1, 0);
    const auto a = gof::draw_contaminated(h0, gof::contamination_model("A:fraction=1", 1), 2000, rng);
    for (double v : a.coords()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 0.5);
    }
    const auto c = gof::draw_contaminated(h0, gof::contamination_model("C:fraction=1", 1), 2000, rng);
    for (double v : c.coords()) {
        EXPECT_GT(v, 0.3);
        EXPECT_LT(v, 0.7);
    }
    const auto b = gof::draw_contaminated(h0, gof::contamination_model("B:fraction=1", 1), 2000, rng);
    for (double v : b.coords()) EXPECT_TRUE(v < 0.3 || v > 0.7) << v;
}

TEST(Contamination, FractionIsRealizedPerPoint) {
    const auto h0 = gof::parse_hypothesis("uniform01");
    gof::RandomStream rng(2, 0);
    const auto s = gof::draw_contaminated(h0, gof::contamination_model("C:fraction=0.3", 1), 20000, rng);
    // Outside [0.3, 0.7] only H0 points land: expected share 0.7 * 0.6.
    std::size_t outside = 0;
    for (double v : s.coords()) outside += (v < 0.3 || v > 0.7);
    EXPECT_NEAR(outside / 20000.0, 0.42, 0.015);
}

TEST(Contamination, DimensionMismatch) {
    const auto h0 = gof::parse_hypothesis("uniform01");
    gof::RandomStream rng(3, 0);
    EXPECT_THROW(gof::draw_contaminated(h0, gof::contamination_model("blob", 2), 10, rng), gof::PreconditionError);
    const auto g2 = gof::parse_hypothesis("gauss2d");
    EXPECT_THROW(gof::draw_contaminated(g2, gof::contamination_model("A", 1), 10, rng), gof::PreconditionError);
}

TEST(Contamination, WhitenedFrameMapping) {
    const auto h0 = gof::parse_hypothesis("gauss2d(10,-10,4,0,1)");
    gof::RandomStream rng(4, 0);
    const auto s = gof::draw_contaminated(h0, gof::contamination_model("blob:fraction=1", 2), 5000, rng);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        mx += s.point(i)[0];
        my += s.point(i)[1];
    }
    EXPECT_NEAR(mx / 5000, 12.0, 0.05);
    EXPECT_NEAR(my / 5000, -9.0, 0.05);
}

TEST(Power, ZeroFractionGivesAlpha) {
    const auto row = power_of("ks", "uniform01", "A:fraction=0", 50, opts(2000));
    EXPECT_NEAR(row.power, 0.05, 3 * std::sqrt(0.05 * 0.95 / 2000));
    EXPECT_NEAR(row.sigma, std::sqrt(row.power * (1 - row.power) / 2000), 1e-15);
}

TEST(Power, DisjointBackgroundSaturates) {
    // All mass on [0, 0.5] against uniform01.
    const auto row = power_of("ks", "uniform01", "A:fraction=1", 50, opts(400));
    EXPECT_EQ(row.power, 1.0);
}

TEST(Power, MeanShiftKolmogorovBeatsChi2) {
    const auto ks = power_of("ks", "uniform01", "A", 100, opts(2000));
    const auto chi = power_of("chi2:bins=13", "uniform01", "A", 100, opts(2000));
    EXPECT_GT(ks.power, chi.power);
}

TEST(Power, MonotoneInFraction) {
    double prev = 0.0, prev_sigma = 0.0;
    for (const char* m : {"B:fraction=0.1", "B:fraction=0.2", "B:fraction=0.4"}) {
        const auto row = power_of("kuiper", "uniform01", m, 100, opts(800));
        EXPECT_GE(row.power + 3 * std::hypot(row.sigma, prev_sigma), prev) << m;
        prev = row.power;
        prev_sigma = row.sigma;
    }
}

TEST(Power, NeedsEnoughTrialsAndReplicas) {
    const auto h0 = gof::parse_hypothesis("uniform01");
    const auto proc = gof::bind_statistic(gof::StatisticSpec::parse("ks"), h0, 20, 1);
    const auto null = gof::calibrate_procedure(proc, h0, 20, 50, 1, 1);
    gof::PowerOptions o;
    o.trials = 100;
    EXPECT_THROW(gof::estimate_power(proc, h0, gof::contamination_model("A", 1), 20, null, o),
                 gof::PreconditionError);
    o.trials = 400;
    EXPECT_THROW(gof::estimate_power(proc, h0, gof::contamination_model("A", 1), 20, null, o),
                 gof::ResolutionError);
}

TEST(Study, ParseConfig) {
    std::istringstream in(
        "# demo\nhypothesis = uniform01\nstatistics = ks, chi2:bins=13 ad\nmodels = A B:fraction=0.1\n"
        "fractions = 0.1 0.2\nn = 50 100\nalpha = 0.1\ntrials = 500\nreplicas = 300\nseed = 9\njobs = 2\n");
    const auto cfg = gof::StudyConfig::parse(in);
    EXPECT_EQ(cfg.statistics, (std::vector<std::string>{"ks", "chi2:bins=13", "ad"}));
    EXPECT_EQ(cfg.models.size(), 2u);
    EXPECT_EQ(cfg.fractions, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(cfg.sizes, (std::vector<std::size_t>{50, 100}));
    EXPECT_EQ(cfg.options.alpha, 0.1);
    EXPECT_EQ(cfg.options.trials, 500u);
    EXPECT_EQ(cfg.options.replicas, 300u);
    EXPECT_EQ(cfg.options.seed, 9u);
    EXPECT_EQ(cfg.options.jobs, 2u);
}

TEST(Study, ParseErrorsNameLine) {
    std::istringstream in("statistics = ks\nmodels = A\nbogus = 1\n");
    try {
        gof::StudyConfig::parse(in, "cfg");
        FAIL();
    } catch (const gof::ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("cfg:3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(gof::StudyConfig::load("/nonexistent/study.cfg"), gof::ParseError);
}

gof::StudyConfig tiny() {
    gof::StudyConfig cfg;
    cfg.statistics = {"ks"};
    cfg.models = {"A"};
    cfg.sizes = {30};
    cfg.options.trials = 50;
    cfg.options.replicas = 200;
    cfg.options.allow_few_trials = true;
    cfg.options.seed = 5;
    return cfg;
}

TEST(Study, SingleCellSingleRow) {
    const auto table = gof::run_study(tiny());
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(table.rows[0].status, "ok");
    EXPECT_GE(table.rows[0].power, 0.0);
    EXPECT_LE(table.rows[0].power, 1.0);
}

TEST(Study, RepeatIsIdentical) {
    auto cfg = tiny();
    cfg.statistics = {"ks", "watson", "region3"};
    cfg.models = {"A", "C"};
    std::ostringstream a, b;
    gof::write_power_table(a, gof::run_study(cfg));
    cfg.options.jobs = 3;
    gof::write_power_table(b, gof::run_study(cfg));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str().find("model A: u ~ U(0, 0.5)"), std::string::npos);
}

TEST(Study, FailingCellIsRecorded) {
    auto cfg = tiny();
    cfg.statistics = {"ks", "mardia_b1"};
    const auto table = gof::run_study(cfg);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].status, "ok");
    EXPECT_EQ(table.rows[1].status.rfind("error: ", 0), 0u);
}

TEST(Study, ChartIsSvg) {
    const auto table = gof::run_study(tiny());
    std::ostringstream svg;
    gof::write_power_chart(svg, table, "A");
    EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
    EXPECT_NE(svg.str().find("<rect"), std::string::npos);
}

}  // namespace
