// dogd-bench: runs the experiment presets, evaluates regret bounds, and
// post-processes CSV output.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dogd/analysis.hpp"
#include "dogd/bench.hpp"
#include "dogd/config.hpp"
#include "dogd/report.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;
constexpr int kExitIo = 4;

struct RunArgs {
  std::string config_path;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<int> horizon;
  std::vector<int> delays;
  std::string out_dir;
  std::optional<int> stride;
  std::optional<int> threads;
  std::vector<std::string> set;
  bool quiet = false;
  bool print_config = false;
};

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw dogd::ConfigError("bounds: '" + key + "' is not a number: " + text);
  return v;
}

int run_command(const RunArgs& args) {
  dogd::ExperimentConfig config;
  if (!args.config_path.empty() && !args.experiment.empty()) {
    throw dogd::ConfigError("give either a config path or --experiment, not both");
  }
  if (!args.config_path.empty()) {
    config = dogd::load_config(args.config_path);
  } else if (!args.experiment.empty()) {
    config = dogd::preset(args.experiment);
  } else {
    throw dogd::ConfigError("run needs a config path or --experiment");
  }
  std::map<std::string, std::string> overrides;
  for (const auto& kv : args.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw dogd::ConfigError("--set expects key=value, got '" + kv + "'");
    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  config = dogd::apply_settings(config, overrides);
  if (args.seed) config.seed = *args.seed;
  if (args.reps) config.repetitions = *args.reps;
  if (args.horizon) config.horizon = *args.horizon;
  if (!args.delays.empty()) config.delays = args.delays;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.stride) config.stride = *args.stride;
  if (args.threads) config.threads = *args.threads;
  config.validate();
  if (args.print_config) {
    std::cout << dogd::to_text(config);
    return 0;
  }

  dogd::ExperimentResult result;
  try {
    auto progress = [&](const std::string& msg) {
      if (!args.quiet) std::cerr << msg << '\n';
    };
    result = dogd::run_experiment(config, progress);
  } catch (const dogd::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRun;
  }

  const auto base = config.out_dir / config.experiment;
  dogd::emit_csv(result.records, base.string() + ".csv");
  dogd::emit_summary(result.summary, base.string() + "_summary.csv");
  dogd::emit_plot(result.records, base.string() + ".svg", config.experiment);
  dogd::write_file(base.string() + ".cfg", dogd::to_text(config));
  std::cout << dogd::summary_text(result.summary);
  return 0;
}

int bounds_command(const std::string& family, const std::vector<std::string>& params) {
  dogd::BoundInputs in;
  std::optional<double> alpha;
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw dogd::ConfigError("--params expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const double v = parse_number(key, kv.substr(eq + 1));
    if (key == "R") in.R = v;
    else if (key == "kappa") in.kappa = v;
    else if (key == "L") in.L = v;
    else if (key == "Gamma") in.Gamma = v;
    else if (key == "G") in.G = v;
    else if (key == "d") in.d = static_cast<int>(v);
    else if (key == "T") in.T = static_cast<int>(v);
    else if (key == "eta") in.eta = v;
    else if (key == "V") in.V = v;
    else if (key == "Delta") in.Delta = v;
    else if (key == "Lambda") in.Lambda = v;
    else if (key == "p") in.p = static_cast<int>(v);
    else if (key == "h_sum") in.h_sum = v;
    else if (key == "h_sq_sum") in.h_sq_sum = v;
    else if (key == "alpha") alpha = v;
    else throw dogd::ConfigError("bounds: unknown parameter '" + key + "'");
  }
  if (in.d < 1 || in.T < 1 || in.p < 1) throw dogd::ConfigError("bounds: d, T and p must be >= 1");
  if (!(in.kappa > 0.0) || !(in.eta > 0.0)) throw dogd::ConfigError("bounds: kappa and eta must be positive");

  auto print_quadratic = [](const char* name, double a_thr, const dogd::QuadraticBound& q) {
    fmt::print("alpha {}\na {}\nb {}\nc {}\n{} {}\n", dogd::format_double(a_thr), dogd::format_double(q.a),
               dogd::format_double(q.b), dogd::format_double(q.c), name, dogd::format_double(q.value));
  };
  try {
    if (family == "lipschitz" || family == "radial") {
      fmt::print("bound_lipschitz {}\n", dogd::format_double(dogd::bound_lipschitz(in)));
      if (in.Delta == 0.0 && in.Lambda == 0.0) {
        fmt::print("bound_lipschitz_exact_gradient {}\n",
                   dogd::format_double(dogd::bound_lipschitz_exact_gradient(in)));
      }
    } else if (family == "weakly-smooth" || family == "glm") {
      const double a = alpha.value_or(dogd::weakly_smooth_alpha_general(in.kappa, in.Gamma, in.d));
      print_quadratic("bound_weakly_smooth", a, dogd::bound_weakly_smooth(in, a));
    } else if (family == "bandit" || family == "quadfrac") {
      const double a = alpha.value_or(dogd::bandit_alpha(in.kappa, in.G, in.d));
      print_quadratic("bound_bandit", a, dogd::bound_bandit(in, a));
    } else {
      throw dogd::ConfigError("bounds: unknown family '" + family + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw dogd::ConfigError(std::string("bounds: ") + e.what());
  }
  return 0;
}

int summarize_command(const std::string& csv, double threshold, const std::string& out) {
  std::vector<dogd::RunRecord> records;
  try {
    records = dogd::read_csv(csv);
  } catch (const std::invalid_argument& e) {
    throw dogd::IoError(csv + ": " + e.what());
  }
  const auto rows = dogd::summarize_records(records, threshold);
  if (out.empty()) {
    std::cout << dogd::summary_text(rows);
  } else {
    dogd::emit_summary(rows, out);
  }
  return 0;
}

int plot_command(const std::string& csv, const std::string& out, const std::string& title) {
  std::vector<dogd::RunRecord> records;
  try {
    records = dogd::read_csv(csv);
  } catch (const std::invalid_argument& e) {
    throw dogd::IoError(csv + ": " + e.what());
  }
  dogd::emit_plot(records, out, title);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed online gradient descent experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run an experiment from a config file or preset");
  run->add_option("config", run_args.config_path, "config file (key = value lines)");
  run->add_option("--experiment", run_args.experiment, "preset id")
      ->check(CLI::IsMember(dogd::experiment_ids()));
  run->add_option("--seed", run_args.seed, "base seed");
  run->add_option("--reps", run_args.reps, "repetitions");
  run->add_option("--horizon", run_args.horizon, "rounds T");
  run->add_option("--delays", run_args.delays, "delay levels")->delimiter(',');
  run->add_option("--out-dir", run_args.out_dir, "output directory");
  run->add_option("--stride", run_args.stride, "CSV round stride");
  run->add_option("--threads", run_args.threads, "worker threads");
  run->add_option("--set", run_args.set, "extra key=value overrides");
  run->add_flag("--quiet", run_args.quiet, "no progress output");
  run->add_flag("--print-config", run_args.print_config, "print the resolved config and exit");

  std::string family;
  std::vector<std::string> params;
  auto* bounds = app.add_subcommand("bounds", "evaluate a regret bound");
  bounds->add_option("--family", family, "lipschitz|radial, weakly-smooth|glm, bandit|quadfrac")->required();
  bounds->add_option("--params", params, "key=value inputs: R kappa L Gamma G d T eta V Delta Lambda p h_sum h_sq_sum alpha");

  std::string csv_path, out_path, title;
  double threshold = 0.1;
  auto* summarize = app.add_subcommand("summarize", "summary table from a CSV");
  summarize->add_option("csv", csv_path)->required();
  summarize->add_option("--threshold", threshold, "error threshold");
  summarize->add_option("--out", out_path, "write to file instead of stdout");

  auto* plot = app.add_subcommand("plot", "SVG average-regret plot from a CSV");
  plot->add_option("csv", csv_path)->required();
  plot->add_option("--out", out_path)->required();
  plot->add_option("--title", title);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(run_args);
    if (*bounds) return bounds_command(family, params);
    if (*summarize) return summarize_command(csv_path, threshold, out_path);
    if (*plot) return plot_command(csv_path, out_path, title);
  } catch (const dogd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dogd::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRun;
  }
  return 0;
}
