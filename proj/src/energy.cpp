#include "gof/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gof/error.hpp"
#include "gof/summation.hpp"

namespace gof {

std::string_view kernel_family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::power:
            return "power";
        case KernelFamily::log:
            return "log";
        case KernelFamily::gaussian:
            return "gaussian";
    }
    return "log";
}

void Kernel::validate() const {
    if (!(d_min >= 0.0) || !std::isfinite(d_min)) {
        throw PreconditionError("d_min must be finite and non-negative");
    }
    switch (family) {
        case KernelFamily::power:
            if (!(kappa > 0.0) || !std::isfinite(kappa)) {
                throw PreconditionError("power kernel needs kappa > 0");
            }
            [[fallthrough]];
        case KernelFamily::log:
            if (!(d_min >= kMinCutoff)) {
                throw PreconditionError("power and log kernels need a positive cutoff d_min");
            }
            break;
        case KernelFamily::gaussian:
            if (!(s > 0.0) || !std::isfinite(s)) {
                throw PreconditionError("gaussian kernel needs s > 0");
            }
            break;
    }
}

simd::PairKernelParams Kernel::params() const {
    simd::PairKernelParams p;
    p.family = family;
    p.kappa = kappa;
    p.inv_two_s2 = 1.0 / (2.0 * s * s);
    p.d_min = d_min;
    return p;
}

double kernel_eval(const Kernel& k, double r) {
    if (!(r >= 0.0)) {
        throw PreconditionError("kernel distance must be non-negative");
    }
    return simd::kernel_value(k.params(), r);
}

EnergyScorer::EnergyScorer(const Sample& sim, const Kernel& kernel)
    : sim_(sim.coords(), sim.dim()), kernel_(kernel) {
    kernel_.validate();
}

EnergyValue EnergyScorer::score(const Sample& data, std::size_t jobs) const {
    if (data.dim() != sim_.dim) {
        throw DimensionError("data dimension " + std::to_string(data.dim()) +
                             " does not match simulation dimension " + std::to_string(sim_.dim));
    }
    const std::size_t n = data.size();
    if (n < 2) {
        throw PreconditionError("energy statistic needs at least two data points");
    }
    const auto& kern = simd::active_kernels();
    const auto params = kernel_.params();
    const simd::SoaPoints data_soa(data.coords(), data.dim());

    std::vector<NeumaierSum> self_rows(n);
    std::vector<NeumaierSum> cross_rows(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        const auto q = data.point(i);
        self_rows[i] = kern.pair_row(q, data_soa, i + 1, n, params);
        cross_rows[i] = kern.pair_row(q, sim_, 0, sim_.count, params);
    });

    NeumaierSum self;
    NeumaierSum cross;
    for (std::size_t i = 0; i < n; ++i) {
        self.add(self_rows[i]);
        cross.add(cross_rows[i]);
    }
    const auto nn = static_cast<double>(n);
    const auto mm = static_cast<double>(sim_.count);
    EnergyValue v;
    v.phi1 = self.value() / (nn * nn);
    v.phi2 = -cross.value() / (nn * mm);
    if (!std::isfinite(v.phi1) || !std::isfinite(v.phi2)) {
        throw NumericError("energy statistic is not finite");
    }
    v.phi = v.phi1 + v.phi2;
    return v;
}

EnergyValue energy_statistic(const Sample& data, const Sample& sim, const Kernel& kernel,
                             std::size_t jobs) {
    return EnergyScorer(sim, kernel).score(data, jobs);
}

namespace {

// Sorted distances from point i to every other point, truncated to k.
std::vector<double> nearest_distances(const Sample& s, std::size_t i, std::size_t k) {
    std::vector<double> d;
    d.reserve(s.size() - 1);
    const auto p = s.point(i);
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (j == i) continue;
        const auto q = s.point(j);
        double r2 = 0.0;
        for (std::size_t c = 0; c < s.dim(); ++c) {
            const double diff = p[c] - q[c];
            r2 += diff * diff;
        }
        d.push_back(std::sqrt(r2));
    }
    const std::size_t keep = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep), d.end());
    d.resize(keep);
    return d;
}

}  // namespace

double default_d_min(const Sample& sim) {
    const std::size_t m = sim.size();
    if (m < 2) {
        throw PreconditionError("default d_min needs at least two simulation points");
    }
    const std::size_t k = std::min<std::size_t>(10, m - 1);
    std::vector<std::pair<double, double>> density;  // (k-th NN distance, 1-NN distance)
    density.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto d = nearest_distances(sim, i, k);
        density.emplace_back(d.back(), d.front());
    }
    std::sort(density.begin(), density.end());
    const std::size_t decile = std::max<std::size_t>(1, m / 10);
    NeumaierSum sum;
    for (std::size_t i = 0; i < decile; ++i) sum.add(density[i].second);
    const double d_min = sum.value() / static_cast<double>(decile);
    if (!(d_min > 0.0)) {
        throw NumericError("simulation sample has coincident points; set d_min explicitly");
    }
    return d_min;
}

double default_gaussian_s(const Sample& sim) {
    const std::size_t m = sim.size();
    if (m < 2) {
        throw PreconditionError("default s needs at least two simulation points");
    }
    NeumaierSum sum;
    for (std::size_t i = 0; i < m; ++i) sum.add(nearest_distances(sim, i, 1).front());
    const double s = 3.0 * sum.value() / static_cast<double>(m);
    if (!(s > 0.0)) {
        throw NumericError("simulation sample has coincident points; set s explicitly");
    }
    return s;
}

Sample fixed_simulation_sample(const MultivariateHypothesis& h, std::size_t m, std::uint64_t seed) {
    if (h.reference()) return *h.reference();
    RandomStream rng(derive_seed(seed, "energy-sim"), 0);
    return h.sample(rng, m);
}

NullDistribution energy_null_distribution(const MultivariateHypothesis& h, std::size_t n,
                                          std::size_t m, const Kernel& kernel,
                                          std::size_t replicas, std::uint64_t seed,
                                          SimProtocol protocol, std::size_t jobs) {
    kernel.validate();
    std::ostringstream canonical;
    canonical.precision(17);
    canonical << "energy|kernel=" << kernel_family_name(kernel.family) << "|kappa=" << kernel.kappa
              << "|s=" << kernel.s << "|dmin=" << kernel.d_min << "|m=" << m
              << "|sim=" << (protocol == SimProtocol::fixed ? "fixed" : "fresh")
              << "|h=" << h.identity() << "|n=" << n;
    const std::string digest = config_digest(canonical.str());

    const auto sampler = [&h](RandomStream& rng, std::size_t count) { return h.sample(rng, count); };
    if (protocol == SimProtocol::fixed) {
        const EnergyScorer scorer(fixed_simulation_sample(h, m, seed), kernel);
        return build_null("energy", digest,
                          [&scorer](const Sample& s, RandomStream&) { return scorer.score(s).phi; },
                          sampler, n, replicas, seed, jobs);
    }
    return build_null(
        "energy", digest,
        [&h, &kernel, m](const Sample& s, RandomStream& rng) {
            return energy_statistic(s, h.sample(rng, m), kernel).phi;
        },
        sampler, n, replicas, seed, jobs);
}

}  // namespace gof
