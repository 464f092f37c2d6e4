#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dogd/oracles.hpp"

namespace dogd {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LossFamily { Radial, Glm, QuadFrac };

const char* family_name(LossFamily family);

enum class StepRule { Auto, Constant, LipschitzOptimal, WeaklySmooth };

/// One feedback variant of an experiment, e.g. exact gradients or
/// forward differences with h_t = h_scale * t^{-a}.
struct OracleSpec {
  enum class Kind { Exact, Noisy, ForwardDifference, SymmetricDifference };
  Kind kind = Kind::Exact;
  double exponent = 1.0;  // a in h_t or delta_t
  double scale = 1.0;     // h_scale or delta scale
  NoisePattern::Kind pattern = NoisePattern::Kind::FixedAxis;

  /// Parses "exact", "fd:<a>", "sym:<a>" or "noisy:<scale>:<a>[:fixed|cyclic|alternating]".
  /// `h_scale` is used for the difference kinds.
  static OracleSpec parse(const std::string& text, double h_scale);
  /// Label used in the experiment column: "full", "a=<a>", "sym-a=<a>", "noisy-a=<a>".
  std::string label() const;
  bool zeroth_order() const { return kind == Kind::ForwardDifference || kind == Kind::SymmetricDifference; }
};

struct ExperimentConfig {
  std::string experiment = "custom";
  LossFamily family = LossFamily::Radial;
  int horizon = 20000;
  int dimension = 100;
  double radius = 100.0;
  std::vector<int> delays{1, 5, 10, 20};
  int repetitions = 20;
  std::uint64_t seed = 1;
  int stride = 0;   // 0: max(1, T / 2000)
  int threads = 0;  // 0: hardware concurrency
  std::filesystem::path out_dir = "results";
  double threshold = 0.1;
  int smoothing_window = 50;

  StepRule step = StepRule::Auto;
  double eta = 0.0;
  double step_factor = 0.99;

  // radial
  double amplitude_bound = 1.0;
  double frequency_bound = 2.5;
  double init_low = 0.2;
  double init_high = 0.4;

  // glm
  int samples = 1000;
  double drift_scale = 0.1;
  std::vector<double> drift_exponents{0.5};

  // quadfrac
  double qf_drift_factor = 0.01;
  double subsolver_tol = 1e-6;
  int subsolver_max_iter = 100000;

  std::vector<OracleSpec> oracles{OracleSpec{}};
  double h_scale = 1.0;

  int effective_stride() const;
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Known experiment ids.
const std::vector<std::string>& experiment_ids();

/// Full-scale configuration for an experiment id; throws ConfigError if unknown.
ExperimentConfig preset(const std::string& id);

/// Applies `key = value` pairs on top of `base`. Unknown keys are errors.
ExperimentConfig apply_settings(ExperimentConfig base, const std::map<std::string, std::string>& settings);

/// Parses flat `key = value` text ('#' starts a comment). If `experiment` is
/// given the matching preset is the starting point.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The documented key list, in file order.
const std::vector<std::string>& config_keys();

/// Serializes every key so that parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

}  // namespace dogd
