#pragma once

// Power studies: contaminated alternatives and the rejection-rate harness.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gof/calibrate.hpp"
#include "gof/random.hpp"
#include "gof/registry.hpp"
#include "gof/sample.hpp"

namespace gof {

// Mixture (1 - fraction) H0 + fraction background, realized per point.
//
// Univariate backgrounds are defined on the probability scale u in (0, 1)
// and mapped through the H0 quantile. Multivariate backgrounds are defined
// in the whitened frame y and mapped to mean + L y of the Gaussian H0.
struct ContaminationModel {
    enum class Frame { probability, whitened };

    std::string name;
    std::string formula;
    Frame frame = Frame::probability;
    std::size_t dim = 1;
    std::function<void(RandomStream&, std::span<double>)> background;
    double fraction = 0.0;
};

// A (mean shift), B (wider), C (narrower) on the probability scale;
// blob, ring and diagonal in the whitened frame of a Gaussian H0.
const std::vector<std::string>& contamination_names();

// "name" or "name:fraction=f". The default fraction is 0.3 for univariate
// and 0.2 for multivariate models; `dim` sizes the multivariate ones.
ContaminationModel contamination_model(std::string_view spec, std::size_t dim);

// Throws PreconditionError if the model does not fit the hypothesis.
Sample draw_contaminated(const NullHypothesis& h0, const ContaminationModel& model, std::size_t n,
                         RandomStream& rng);

struct PowerRow {
    std::string statistic;
    std::string model;
    double fraction = 0.0;
    std::size_t n = 0;
    double alpha = 0.05;
    double power = 0.0;
    double sigma = 0.0;
    std::size_t trials = 0;
    std::size_t replicas = 0;
    std::string status = "ok";
};

struct PowerOptions {
    double alpha = 0.05;
    std::size_t trials = 1000;
    std::size_t replicas = 2000;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    // Disables the trials >= 400 precondition (small smoke runs).
    bool allow_few_trials = false;
};

// Seed of the contaminated trial samples for one (model, fraction, n) cell.
// Independent of the statistic so that all statistics see the same samples.
std::uint64_t trial_seed(std::uint64_t seed, const ContaminationModel& model, std::size_t n);

// Rejection rate of `proc` (rejecting when p <= alpha against `null`) over
// `trials` contaminated samples of size n; trial t uses stream
// (trial_seed, t). Also returns the per-trial p-values when asked.
PowerRow estimate_power(const Procedure& proc, const NullHypothesis& h0,
                        const ContaminationModel& model, std::size_t n,
                        const NullDistribution& null, const PowerOptions& options,
                        std::vector<double>* p_values = nullptr);

// Null distribution of a procedure under pure H0 with the study seed.
NullDistribution calibrate_procedure(const Procedure& proc, const NullHypothesis& h0,
                                     std::size_t n, std::size_t replicas, std::uint64_t seed,
                                     std::size_t jobs, const NullCache* cache = nullptr,
                                     bool* cache_hit = nullptr);

// Study description, one "key = value" per line, '#' comments:
//   hypothesis = uniform01
//   statistics = ks ad chi2:bins=13       (comma or space separated)
//   models     = A B:fraction=0.2 C
//   fractions  = 0.1 0.2 0.4               (optional; overrides model fractions)
//   n          = 100                       (one or more)
//   alpha = 0.05, trials = 1000, replicas = 2000, seed = 1, jobs = 1
struct StudyConfig {
    std::string hypothesis = "uniform01";
    std::vector<std::string> statistics;
    std::vector<std::string> models;
    std::vector<double> fractions;
    std::vector<std::size_t> sizes{100};
    PowerOptions options;

    static StudyConfig parse(std::istream& is, std::string_view source = "<config>");
    static StudyConfig load(const std::filesystem::path& path);
};

struct PowerTable {
    std::vector<std::string> header;  // provenance lines, without the leading "# "
    std::vector<PowerRow> rows;
};

// Cross product statistics x models x fractions x sizes. A failing cell is
// recorded with status "error: <message>" and the study goes on.
PowerTable run_study(const StudyConfig& config, const NullCache* cache = nullptr);

// Tab-separated, columns: statistic model fraction n alpha power sigma
// trials replicas status, preceded by "# " provenance lines.
void write_power_table(std::ostream& os, const PowerTable& table);

// Bar chart of power per statistic for one model, as SVG.
void write_power_chart(std::ostream& os, const PowerTable& table, std::string_view model);

}  // namespace gof
