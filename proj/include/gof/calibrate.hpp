#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gof/random.hpp"
#include "gof/sample.hpp"

namespace gof {

enum class Tail { upper, lower, two_sided };

std::string_view tail_name(Tail tail);

// Statistic evaluated on a sample; the stream serves auxiliary draws (fresh
// simulation samples) and is positioned right after the sample draw.
using StatisticFn = std::function<double(const Sample&, RandomStream&)>;
using SampleFn = std::function<Sample(RandomStream&, std::size_t)>;

// Sorted Monte Carlo replicas of a statistic under H0.
struct NullDistribution {
    std::string statistic_name;
    std::vector<double> values;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
    std::string config_digest;

    bool operator==(const NullDistribution&) const = default;
};

// Runs fn(i) for i in [0, count) on `jobs` threads. Each index is handled
// exactly once; the first failure (lowest index) is rethrown after all
// workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Replica r draws a fresh sample of size n from stream (seed, r) and scores
// it. The result depends only on (seed, replicas), never on `jobs`.
// Failures are rethrown as gof::Error naming the replica index.
NullDistribution build_null(std::string statistic_name, std::string config_digest,
                            const StatisticFn& statistic, const SampleFn& sampler, std::size_t n,
                            std::size_t replicas, std::uint64_t seed, std::size_t jobs = 1);

// Add-one Monte Carlo p-value: upper = (1 + #{v >= x}) / (R + 1), lower
// symmetric, two_sided = min(1, 2 min(upper, lower)).
double p_value(const NullDistribution& dist, double observed, Tail tail);

// Smallest replica value v with #{values > v} <= alpha R. Throws
// PreconditionError for alpha outside (0, 1) and ResolutionError when
// alpha R < 5 unless the guard is disabled.
double critical_value(const NullDistribution& dist, double alpha, bool enforce_resolution = true);

// Replicas needed for a p-value meant for level alpha: at least 5 / alpha,
// and at least 100 for alpha <= 0.05.
std::size_t minimum_replicas(double alpha);

// 64-bit FNV-1a digest of a canonical configuration string, as 16 hex digits.
std::string config_digest(std::string_view canonical);

// Cache file format (text):
//   line 1: "# gof-null v1 statistic=<name> replicas=<R> seed=<seed> config_digest=<hex>"
//   then R lines, one value each as a C99 hexadecimal float ("%a"),
//   ascending. Hex floats make the round trip bit-exact.
void write_null(std::ostream& os, const NullDistribution& dist);
NullDistribution read_null(std::istream& is);

// Directory of cached null distributions, keyed by digest, replicas and seed.
class NullCache {
public:
    explicit NullCache(std::filesystem::path dir);

    std::filesystem::path path_for(std::string_view digest, std::size_t replicas,
                                   std::uint64_t seed) const;
    std::optional<NullDistribution> load(std::string_view digest, std::size_t replicas,
                                         std::uint64_t seed) const;
    // Writes to a temporary file and renames it into place.
    std::filesystem::path store(const NullDistribution& dist) const;

private:
    std::filesystem::path dir_;
};

}  // namespace gof
