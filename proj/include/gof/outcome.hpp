#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "gof/calibrate.hpp"
#include "gof/registry.hpp"

namespace gof {

struct Decision {
    double alpha = 0.05;
    bool reject = false;
};

struct TestOutcome {
    std::string statistic_name;
    double value = 0.0;
    std::optional<double> p_value;  // absent without calibration
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
    std::optional<Decision> reject_at;
};

// Scores `data` with the procedure and, when `null` is given, attaches the
// p-value and the decision p <= alpha.
TestOutcome evaluate_outcome(const Procedure& proc, const Sample& data,
                             const NullDistribution* null, std::uint64_t seed,
                             std::optional<double> alpha);

}  // namespace gof
