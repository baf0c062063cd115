#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace gof {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Pure function of (counter, key); no hidden state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer, used to derive child seeds from labels.
std::uint64_t mix64(std::uint64_t x);

// Child seed for a named sub-lineage (e.g. "sim", a study cell key).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// A reproducible random sequence identified by (seed, stream_id).
//
// The key is the seed, the upper half of the counter is the stream id and the
// lower half counts 128-bit blocks, so streams never overlap and replica r of
// a Monte Carlo run always sees the same numbers regardless of scheduling.
// Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    double exponential(double rate);
    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gof
