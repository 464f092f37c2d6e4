#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dogd/config.hpp"
#include "dogd/dogd.hpp"

namespace dogd {

/// Constants used to set step sizes and evaluate bounds for one repetition.
struct StreamCertificates {
  double kappa = 1.0;
  std::optional<double> lipschitz;
  std::optional<double> weak_smoothness;
  std::optional<double> smoothness;
};

/// Per-repetition source of losses. One environment can carry several
/// minimizer paths (GLM drift exponents) over shared randomness.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int streams() const = 0;
  virtual void advance(int t) = 0;
  virtual const Loss& loss(int stream) const = 0;
  virtual const Vector& minimizer(int stream) const = 0;
  virtual double minimum_value(int stream) const = 0;
  virtual StreamCertificates certificates() const = 0;
  /// x_1, shared by every run of the repetition.
  virtual const Vector& initial_point() const = 0;
};

/// Seeds for one repetition; every random stream is derived from `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config, std::uint64_t rep_seed);

struct RunRecord {
  std::string experiment;
  int rep = 0;
  int delay = 1;
  int t = 1;
  double regret_cum = 0.0;
  double regret_avg = 0.0;
  double gap_smoothed = 0.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
};

/// Full-resolution outcome of one (variant, delay, repetition) run.
struct RunOutcome {
  std::string label;
  int variant = 0;
  int delay = 1;
  int rep = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  int max_delay = 1;
  std::vector<double> gaps;
  std::vector<double> cumulative;
  double path_variation = 0.0;
  std::optional<std::pair<double, double>> errors;  // (Delta_T, Lambda_T)
  std::int64_t queries = 0;
  double seconds = 0.0;
  StreamCertificates certificates;
  int dimension = 1;
  double radius = 1.0;
  /// sum h_t and sum h_t^2 for difference oracles.
  double h_sum = 0.0;
  double h_sq_sum = 0.0;
  bool zeroth_order = false;
};

struct SummaryRow {
  std::string experiment;
  int delay = 1;
  std::optional<int> iter_threshold;
  double std_final = 0.0;
  double time_mean_s = 0.0;
  double mean_final_regret = 0.0;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;  // ordered by (variant, delay, rep)
  std::vector<RunRecord> records;
  std::vector<SummaryRow> summary;
};

/// Variant labels in order: experiment id, suffixed with "/a=..." or the
/// oracle label when the corresponding axis has more than one entry.
std::vector<std::string> variant_labels(const ExperimentConfig& config);

/// Runs every (variant, delay) pair of one repetition in lockstep over a shared environment.
std::vector<RunOutcome> run_repetition(const ExperimentConfig& config, int rep);

/// All repetitions (threaded), then records and summary rows.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::function<void(const std::string&)>& progress = {});

/// Records at t = 1 and every multiple of `stride`, plus t = T.
std::vector<RunRecord> make_records(const RunOutcome& run, int window, int stride);

/// Rounded mean of per-repetition crossing iterations; absent if any
/// repetition never crossed.
std::optional<int> mean_crossing(const std::vector<std::optional<int>>& crossings);

/// Summary rows per (variant, delay), in run order. Each repetition's crossing
/// is taken on its own smoothed gap; std is the sample standard deviation of
/// the final average regret.
std::vector<SummaryRow> summarize_runs(const std::vector<RunOutcome>& runs, double threshold, int window);

double sample_std(const std::vector<double>& values);

}  // namespace dogd
