#pragma once

#include <cstddef>
#include <cstdint>

#include "gof/calibrate.hpp"
#include "gof/hypothesis.hpp"
#include "gof/sample.hpp"
#include "gof/simd/kernels.hpp"

namespace gof {

// Correlation function R(r) of the energy test:
//   power     R = r^-kappa
//   log       R = -ln r
//   gaussian  R = exp(-r^2 / (2 s^2))
// Distances below d_min are replaced by d_min.
struct Kernel {
    KernelFamily family = KernelFamily::log;
    double kappa = 0.1;
    double s = 1.0;
    double d_min = 0.0;

    static Kernel power(double kappa, double d_min) { return {KernelFamily::power, kappa, 1.0, d_min}; }
    static Kernel log(double d_min) { return {KernelFamily::log, 0.1, 1.0, d_min}; }
    static Kernel gaussian(double s, double d_min = 0.0) {
        return {KernelFamily::gaussian, 0.1, s, d_min};
    }

    // Throws PreconditionError: kappa > 0 (power), s > 0 (gaussian), and a
    // positive d_min of at least kMinCutoff for the singular families.
    void validate() const;
    simd::PairKernelParams params() const;
};

inline constexpr double kMinCutoff = 1e-150;
inline constexpr double kDefaultKappa = 0.1;
inline constexpr double kShortRangeKappa = 0.3;

std::string_view kernel_family_name(KernelFamily family);

double kernel_eval(const Kernel& k, double r);

struct EnergyValue {
    double phi1 = 0.0;  // data-data repulsion, (1/n^2) sum_{i<j} R(d_ij)
    double phi2 = 0.0;  // data-simulation attraction, -(1/(n m)) sum_{i,j} R(t_ij)
    double phi = 0.0;   // phi1 + phi2
};

// Fixed simulation sample and kernel, prepared for repeated scoring.
//
// Pair sums run through the active SIMD kernel table, one compensated sum per
// row, rows reduced in index order; the result does not depend on `jobs`.
class EnergyScorer {
public:
    EnergyScorer(const Sample& sim, const Kernel& kernel);

    EnergyValue score(const Sample& data, std::size_t jobs = 1) const;

    std::size_t dim() const { return sim_.dim; }
    std::size_t sim_size() const { return sim_.count; }
    const Kernel& kernel() const { return kernel_; }

private:
    simd::SoaPoints sim_;
    Kernel kernel_;
};

// Throws DimensionError on mismatched dimensions, PreconditionError for
// n < 2 and NumericError when a kernel value is not finite.
EnergyValue energy_statistic(const Sample& data, const Sample& sim, const Kernel& kernel,
                             std::size_t jobs = 1);

// Mean nearest-neighbour distance of the simulation points in the densest
// decile, density ranked by the distance to the 10th neighbour.
double default_d_min(const Sample& sim);
// Three times the mean nearest-neighbour distance of the simulation sample.
double default_gaussian_s(const Sample& sim);
inline std::size_t default_sim_size(std::size_t n) { return 5 * n; }

enum class SimProtocol {
    fixed,  // every replica scored against the same simulation sample
    fresh,  // every replica draws its own simulation sample
};

// Null distribution of phi for data of size n from h. With the fixed
// protocol the simulation sample is h.reference() when present, otherwise m
// points drawn from stream (derive_seed(seed, "energy-sim"), 0).
NullDistribution energy_null_distribution(const MultivariateHypothesis& h, std::size_t n,
                                          std::size_t m, const Kernel& kernel,
                                          std::size_t replicas, std::uint64_t seed,
                                          SimProtocol protocol = SimProtocol::fixed,
                                          std::size_t jobs = 1);

// The simulation sample used by the fixed protocol.
Sample fixed_simulation_sample(const MultivariateHypothesis& h, std::size_t m, std::uint64_t seed);

}  // namespace gof
