#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gof/energy.hpp"
#include "gof/error.hpp"
#include "gof/hypothesis.hpp"
#include "support.hpp"
#include "oracles.hpp"

namespace {

std::vector<std::vector<double>> rows(const gof::Sample& s) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.emplace_back(s.point(i).begin(), s.point(i).end());
    return out;
}

gof::Sample normal_sample(std::uint64_t seed, std::size_t n, std::size_t d, double shift = 0.0) {
    gof::RandomStream rng(seed, 0);
    std::vector<double> c(n * d);
    for (auto& v : c) v = rng.normal() + shift;
    return gof::Sample(d, c);
}

oracle::Family family_of(gof::KernelFamily f) {
    switch (f) {
        case gof::KernelFamily::power:
            return oracle::Family::power;
        case gof::KernelFamily::log:
            return oracle::Family::log;
        case gof::KernelFamily::gaussian:
            break;
    }
    return oracle::Family::gaussian;
}

TEST(Kernel, Examples) {
    EXPECT_EQ(gof::kernel_eval(gof::Kernel::gaussian(1.0), 0.0), 1.0);
    EXPECT_NEAR(gof::kernel_eval(gof::Kernel::power(1.0, 0.01), 0.001), 100.0, 1e-12);
    EXPECT_EQ(gof::kernel_eval(gof::Kernel::log(0.1), 1.0), 0.0);
}

TEST(Kernel, MonotoneAboveCutoff) {
    for (const auto& k : {gof::Kernel::power(0.1, 0.05), gof::Kernel::power(0.3, 0.05),
                          gof::Kernel::log(0.05), gof::Kernel::gaussian(0.7, 0.0)}) {
        double prev = gof::kernel_eval(k, 0.0);
        for (int i = 1; i < 2000; ++i) {
            const double v = gof::kernel_eval(k, i * 0.005);
            EXPECT_LE(v, prev);
            prev = v;
        }
    }
}

TEST(Kernel, ValidateRejectsSingularWithoutCutoff) {
    EXPECT_THROW(gof::Kernel::power(0.1, 0.0).validate(), gof::PreconditionError);
    EXPECT_THROW(gof::Kernel::log(0.0).validate(), gof::PreconditionError);
    EXPECT_THROW(gof::Kernel::power(-1.0, 0.1).validate(), gof::PreconditionError);
    EXPECT_THROW(gof::Kernel::gaussian(0.0).validate(), gof::PreconditionError);
    EXPECT_NO_THROW(gof::Kernel::gaussian(1.0).validate());
}

TEST(Energy, HandEvaluatedTwoPoints) {
    const gof::Sample pts(1, {0.0, 1.0});
    const auto e = gof::energy_statistic(pts, pts, gof::Kernel::gaussian(1.0));
    const double g = std::exp(-0.5);
    EXPECT_NEAR(e.phi1, 0.25 * g, 1e-15);
    EXPECT_NEAR(e.phi2, -0.25 * (2.0 + 2.0 * g), 1e-15);
    EXPECT_NEAR(e.phi, 0.25 * g - 0.25 * (2.0 + 2.0 * g), 1e-15);
    EXPECT_NEAR(e.phi, -0.65163, 1e-5);
}

TEST(Energy, PhiIsSumOfParts) {
    const auto data = normal_sample(1, 50, 2);
    const auto sim = normal_sample(2, 120, 2);
    const auto e = gof::energy_statistic(data, sim, gof::Kernel::log(0.05));
    EXPECT_EQ(e.phi, e.phi1 + e.phi2);
}

TEST(Energy, FarSimulationVanishes) {
    const auto data = normal_sample(1, 30, 2);
    const auto sim = normal_sample(2, 30, 2, 1e3);
    const auto e = gof::energy_statistic(data, sim, gof::Kernel::gaussian(1.0));
    EXPECT_EQ(e.phi2, 0.0);
    EXPECT_GT(e.phi, 0.0);
}

TEST(Energy, Preconditions) {
    EXPECT_THROW(gof::energy_statistic(gof::Sample(1, {0.0}), gof::Sample(1, {0.0}),
                                       gof::Kernel::gaussian(1.0)),
                 gof::PreconditionError);
    EXPECT_THROW(gof::energy_statistic(gof::Sample(1, {0.0, 1.0}), gof::Sample(2, {0.0, 1.0}),
                                       gof::Kernel::gaussian(1.0)),
                 gof::DimensionError);
}

TEST(Energy, MatchesDoubleLoop) {
    const auto data = normal_sample(3, 70, 3);
    const auto sim = normal_sample(4, 233, 3);
    for (const auto& k : {gof::Kernel::power(0.1, 0.02), gof::Kernel::power(0.3, 0.02),
                          gof::Kernel::log(0.02), gof::Kernel::gaussian(0.8, 0.0)}) {
        const auto got = gof::energy_statistic(data, sim, k);
        const auto want = oracle::energy(rows(data), rows(sim), family_of(k.family), k.kappa, k.s, k.d_min);
        EXPECT_NEAR(got.phi1, want.phi1, 1e-12 * std::max(1.0, std::abs(want.phi1)));
        EXPECT_NEAR(got.phi2, want.phi2, 1e-12 * std::max(1.0, std::abs(want.phi2)));
    }
}

TEST(Energy, IndependentOfJobs) {
    const auto data = normal_sample(5, 300, 2);
    const auto sim = normal_sample(6, 900, 2);
    const gof::EnergyScorer scorer(sim, gof::Kernel::log(0.03));
    const auto a = scorer.score(data, 1);
    for (std::size_t jobs : {2u, 3u, 8u}) {
        const auto b = scorer.score(data, jobs);
        EXPECT_EQ(a.phi1, b.phi1);
        EXPECT_EQ(a.phi2, b.phi2);
    }
}

TEST(Energy, RigidMotionInvariance) {
    const auto data = normal_sample(7, 60, 2);
    const auto sim = normal_sample(8, 150, 2);
    const double c = std::cos(0.7), s = std::sin(0.7);
    auto move = [&](const gof::Sample& x) {
        std::vector<double> out;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = x.point(i)[0], b = x.point(i)[1];
            out.push_back(c * a - s * b + 3.0);
            out.push_back(s * a + c * b - 1.5);
        }
        return gof::Sample(2, out);
    };
    for (const auto& k : {gof::Kernel::log(0.05), gof::Kernel::gaussian(0.5), gof::Kernel::power(0.2, 0.05)}) {
        const auto a = gof::energy_statistic(data, sim, k);
        const auto b = gof::energy_statistic(move(data), move(sim), k);
        EXPECT_NEAR(a.phi, b.phi, 1e-12 * std::max(1.0, std::abs(a.phi)));
    }
}

TEST(Energy, PermutationInvariance) {
    const auto data = normal_sample(9, 40, 2);
    const auto sim = normal_sample(10, 90, 2);
    auto reversed = [](const gof::Sample& x) {
        std::vector<double> out;
        for (std::size_t i = x.size(); i-- > 0;) out.insert(out.end(), x.point(i).begin(), x.point(i).end());
        return gof::Sample(x.dim(), out);
    };
    const auto k = gof::Kernel::log(0.05);
    EXPECT_NEAR(gof::energy_statistic(data, sim, k).phi,
                gof::energy_statistic(reversed(data), reversed(sim), k).phi, 1e-13);
}

TEST(Energy, DisplacementRaisesEnergy) {
    const auto sim = normal_sample(11, 40, 2);
    const auto k = gof::Kernel::gaussian(0.5);
    const double base = gof::energy_statistic(sim, sim, k).phi;
    gof::RandomStream rng(12, 0);
    for (std::size_t i = 0; i < sim.size(); ++i) {
        std::vector<double> moved = to_vector(sim.coords());
        const double angle = 6.283185307179586 * rng.uniform();
        moved[2 * i] += 0.3 * std::cos(angle);
        moved[2 * i + 1] += 0.3 * std::sin(angle);
        EXPECT_GT(gof::energy_statistic(gof::Sample(2, moved), sim, k).phi, base) << i;
    }
}

TEST(Energy, ScalingBehaviour) {
    const auto data = normal_sample(13, 50, 2);
    const auto sim = normal_sample(14, 120, 2);
    const double lambda = 2.5;
    auto scale = [&](const gof::Sample& x) {
        std::vector<double> c = to_vector(x.coords());
        for (auto& v : c) v *= lambda;
        return gof::Sample(x.dim(), c);
    };
    const auto g1 = gof::energy_statistic(data, sim, gof::Kernel::gaussian(0.6));
    const auto g2 = gof::energy_statistic(scale(data), scale(sim), gof::Kernel::gaussian(0.6 * lambda));
    EXPECT_NEAR(g1.phi, g2.phi, 1e-13);

    // -ln(lambda r) = -ln r - ln lambda: phi shifts by a constant that
    // depends only on n and m.
    const auto data2 = normal_sample(15, 50, 2);
    const auto l1 = gof::energy_statistic(data, sim, gof::Kernel::log(0.05));
    const auto l2 = gof::energy_statistic(scale(data), scale(sim), gof::Kernel::log(0.05 * lambda));
    const auto l3 = gof::energy_statistic(data2, sim, gof::Kernel::log(0.05));
    const auto l4 = gof::energy_statistic(scale(data2), scale(sim), gof::Kernel::log(0.05 * lambda));
    EXPECT_NEAR(l2.phi - l1.phi, l4.phi - l3.phi, 1e-12);
}

TEST(Energy, DefaultCutoffsArePositive) {
    const auto sim = normal_sample(16, 1000, 2);
    const double dmin = gof::default_d_min(sim);
    const double s = gof::default_gaussian_s(sim);
    EXPECT_GT(dmin, 0.0);
    EXPECT_LT(dmin, 0.1);
    EXPECT_GT(s, dmin);
    EXPECT_EQ(gof::default_sim_size(200), 1000u);
}

TEST(EnergyNull, SingleReplicaAndDeterminism) {
    const auto h = gof::gaussian_hypothesis(gof::GaussianModel::standard(2));
    const auto one = gof::energy_null_distribution(h, 20, 100, gof::Kernel::log(0.05), 1, 3);
    EXPECT_EQ(one.values.size(), 1u);
    const auto a = gof::energy_null_distribution(h, 20, 100, gof::Kernel::log(0.05), 50, 3, gof::SimProtocol::fixed, 1);
    const auto b = gof::energy_null_distribution(h, 20, 100, gof::Kernel::log(0.05), 50, 3, gof::SimProtocol::fixed, 4);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(std::is_sorted(a.values.begin(), a.values.end()));
    const auto c = gof::energy_null_distribution(h, 20, 100, gof::Kernel::log(0.05), 50, 3, gof::SimProtocol::fresh, 2);
    EXPECT_NE(a.values, c.values);
    EXPECT_NE(a.config_digest, c.config_digest);
}

TEST(EnergyNull, OutlierClusterBeatsAllReplicas) {
    const auto h = gof::gaussian_hypothesis(gof::GaussianModel::standard(2));
    const auto k = gof::Kernel::log(0.05);
    const auto null = gof::energy_null_distribution(h, 50, 250, k, 200, 5);
    std::vector<double> c = to_vector(normal_sample(17, 50, 2).coords());
    for (std::size_t i = 0; i < 20; ++i) {
        c[2 * i] = 3.0 + 0.05 * static_cast<double>(i % 5);
        c[2 * i + 1] = 3.0 + 0.05 * static_cast<double>(i / 5);
    }
    const double phi = gof::energy_statistic(gof::Sample(2, c), gof::fixed_simulation_sample(h, 250, 5), k).phi;
    EXPECT_EQ(gof::p_value(null, phi, gof::Tail::upper), 1.0 / 201.0);
}

}  // namespace
