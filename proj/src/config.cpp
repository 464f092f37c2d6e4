#include "dogd/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dogd {

const char* family_name(LossFamily family) {
  switch (family) {
    case LossFamily::Radial:
      return "radial";
    case LossFamily::Glm:
      return "glm";
    case LossFamily::QuadFrac:
      return "quadfrac";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError("config: key '" + key + "' out of range");
  return static_cast<int>(v);
}

LossFamily parse_family(const std::string& text) {
  if (text == "radial") return LossFamily::Radial;
  if (text == "glm") return LossFamily::Glm;
  if (text == "quadfrac") return LossFamily::QuadFrac;
  throw ConfigError("config: unknown family '" + text + "' (radial, glm, quadfrac)");
}

StepRule parse_step(const std::string& text) {
  if (text == "auto") return StepRule::Auto;
  if (text == "constant") return StepRule::Constant;
  if (text == "lipschitz") return StepRule::LipschitzOptimal;
  if (text == "weakly-smooth") return StepRule::WeaklySmooth;
  throw ConfigError("config: unknown step rule '" + text +
                    "' (auto, constant, lipschitz, weakly-smooth)");
}

const char* step_name(StepRule rule) {
  switch (rule) {
    case StepRule::Auto:
      return "auto";
    case StepRule::Constant:
      return "constant";
    case StepRule::LipschitzOptimal:
      return "lipschitz";
    case StepRule::WeaklySmooth:
      return "weakly-smooth";
  }
  return "?";
}

const char* pattern_name(NoisePattern::Kind kind) {
  switch (kind) {
    case NoisePattern::Kind::FixedAxis:
      return "fixed";
    case NoisePattern::Kind::CyclicAxis:
      return "cyclic";
    case NoisePattern::Kind::AlternatingRandom:
      return "alternating";
  }
  return "?";
}

std::string oracle_text(const OracleSpec& o) {
  switch (o.kind) {
    case OracleSpec::Kind::Exact:
      return "exact";
    case OracleSpec::Kind::ForwardDifference:
      return fmt::format("fd:{}", o.exponent);
    case OracleSpec::Kind::SymmetricDifference:
      return fmt::format("sym:{}", o.exponent);
    case OracleSpec::Kind::Noisy:
      return fmt::format("noisy:{}:{}:{}", o.scale, o.exponent, pattern_name(o.pattern));
  }
  return "?";
}

template <typename T>
std::string join(const std::vector<T>& items) {
  return fmt::format("{}", fmt::join(items, ","));
}

}  // namespace

OracleSpec OracleSpec::parse(const std::string& text, double h_scale) {
  const auto parts = split(text, ':');
  OracleSpec o;
  if (parts.empty()) throw ConfigError("config: empty oracle spec");
  const std::string& kind = parts[0];
  if (kind == "exact" && parts.size() == 1) return o;
  if ((kind == "fd" || kind == "sym") && parts.size() == 2) {
    o.kind = kind == "fd" ? Kind::ForwardDifference : Kind::SymmetricDifference;
    o.exponent = parse_double("oracles", parts[1]);
    o.scale = h_scale;
    return o;
  }
  if (kind == "noisy" && (parts.size() == 3 || parts.size() == 4)) {
    o.kind = Kind::Noisy;
    o.scale = parse_double("oracles", parts[1]);
    o.exponent = parse_double("oracles", parts[2]);
    if (parts.size() == 4) {
      if (parts[3] == "fixed") {
        o.pattern = NoisePattern::Kind::FixedAxis;
      } else if (parts[3] == "cyclic") {
        o.pattern = NoisePattern::Kind::CyclicAxis;
      } else if (parts[3] == "alternating") {
        o.pattern = NoisePattern::Kind::AlternatingRandom;
      } else {
        throw ConfigError("config: unknown noise pattern '" + parts[3] + "'");
      }
    }
    return o;
  }
  throw ConfigError("config: cannot parse oracle '" + text +
                    "' (exact, fd:<a>, sym:<a>, noisy:<scale>:<a>[:pattern])");
}

std::string OracleSpec::label() const {
  switch (kind) {
    case Kind::Exact:
      return "full";
    case Kind::ForwardDifference:
      return fmt::format("a={}", exponent);
    case Kind::SymmetricDifference:
      return fmt::format("sym-a={}", exponent);
    case Kind::Noisy:
      return fmt::format("noisy-a={}", exponent);
  }
  return "?";
}

int ExperimentConfig::effective_stride() const {
  if (stride > 0) return stride;
  return std::max(1, horizon / 2000);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (horizon < 1) fail("horizon must be >= 1");
  if (dimension < 1) fail("dimension must be >= 1");
  if (!(radius > 0.0)) fail("radius must be positive");
  if (delays.empty()) fail("delays must list at least one level");
  for (int d : delays) {
    if (d < 1) fail("every delay level must be >= 1");
  }
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (stride < 0) fail("stride must be >= 0");
  if (threads < 0) fail("threads must be >= 0");
  if (!(threshold > 0.0)) fail("threshold must be positive");
  if (smoothing_window < 1) fail("smoothing_window must be >= 1");
  if (step == StepRule::Constant && !(eta > 0.0)) fail("step = constant requires eta > 0");
  if (!(step_factor > 0.0 && step_factor < 1.0)) fail("step_factor must lie in (0, 1)");
  if (oracles.empty()) fail("oracles must list at least one variant");
  if (drift_exponents.empty()) fail("drift_exponents must list at least one value");
  for (double a : drift_exponents) {
    if (!(a > 0.0)) fail("drift exponents must be positive");
  }
  if (drift_scale < 0.0) fail("drift_scale must be nonnegative");
  for (const auto& o : oracles) {
    if (o.zeroth_order()) {
      if (!(o.scale > 0.0 && o.scale < radius)) fail("h_scale must lie in (0, radius)");
      if (o.exponent < 0.0) fail("difference-oracle exponent must be >= 0");
    }
    if (o.kind == OracleSpec::Kind::Noisy && o.scale < 0.0) fail("noise scale must be nonnegative");
  }
  switch (family) {
    case LossFamily::Radial:
      if (amplitude_bound < 0.0 || frequency_bound < 0.0) fail("coefficient bounds must be >= 0");
      if (!(init_low <= init_high)) fail("init_low must not exceed init_high");
      if (drift_exponents.size() > 1) fail("radial losses have a fixed minimizer; one drift exponent only");
      break;
    case LossFamily::Glm:
      if (samples < 1) fail("samples must be >= 1");
      break;
    case LossFamily::QuadFrac:
      if (qf_drift_factor < 0.0) fail("qf_drift_factor must be >= 0");
      if (!(subsolver_tol > 0.0) || subsolver_max_iter < 1) fail("invalid subsolver settings");
      if (drift_exponents.size() > 1) fail("quadfrac streams take one drift exponent only");
      break;
  }
  if (step == StepRule::LipschitzOptimal && family != LossFamily::Radial) {
    fail("step = lipschitz needs a Lipschitz certificate (radial family only)");
  }
  if (step == StepRule::WeaklySmooth && family == LossFamily::Radial) {
    fail("step = weakly-smooth needs a weak-smoothness certificate (glm, quadfrac)");
  }
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"radial",   "high-delay-radial", "glm",   "glm-vt-sweep",
                                            "quadfrac", "quadfrac-bandit",   "custom"};
  return ids;
}

ExperimentConfig preset(const std::string& id) {
  ExperimentConfig c;
  c.experiment = id;
  if (id == "radial" || id == "high-delay-radial" || id == "custom") {
    c.family = LossFamily::Radial;
    c.dimension = 100;
    c.radius = 100.0;
    c.threshold = 0.1;
    if (id == "high-delay-radial") {
      c.horizon = 200000;
      c.delays = {20, 50, 100, 150, 200};
    }
  } else if (id == "glm" || id == "glm-vt-sweep") {
    c.family = LossFamily::Glm;
    c.dimension = 100;
    c.radius = 1.0;
    c.threshold = 1e-4;
    if (id == "glm-vt-sweep") {
      c.delays = {5};
      c.drift_exponents = {0.0625, 0.125, 0.25, 0.5, 1.0};
    }
  } else if (id == "quadfrac" || id == "quadfrac-bandit") {
    c.family = LossFamily::QuadFrac;
    c.dimension = 50;
    c.radius = 10.0;
    c.threshold = 1e-5;
    if (id == "quadfrac-bandit") {
      c.delays = {5};
      c.oracles = {OracleSpec{}, OracleSpec::parse("fd:1", 1.0), OracleSpec::parse("fd:0.8", 1.0),
                   OracleSpec::parse("fd:0.6", 1.0), OracleSpec::parse("fd:0.4", 1.0)};
    }
  } else {
    throw ConfigError("unknown experiment '" + id + "'");
  }
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "experiment",      "family",          "horizon",         "dimension",        "radius",
      "delays",          "repetitions",     "seed",            "stride",           "threads",
      "out_dir",         "threshold",       "smoothing_window", "step",            "eta",
      "step_factor",     "amplitude_bound", "frequency_bound", "init_low",         "init_high",
      "samples",         "drift_scale",     "drift_exponents", "qf_drift_factor",  "subsolver_tol",
      "subsolver_max_iter", "h_scale",      "oracles"};
  return keys;
}

ExperimentConfig apply_settings(ExperimentConfig c, const std::map<std::string, std::string>& settings) {
  for (const auto& [key, value] : settings) {
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end()) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  auto get = [&](const char* key) -> const std::string* {
    auto it = settings.find(key);
    return it == settings.end() ? nullptr : &it->second;
  };
  if (auto v = get("experiment")) c.experiment = *v;
  if (auto v = get("family")) c.family = parse_family(*v);
  if (auto v = get("horizon")) c.horizon = parse_int("horizon", *v);
  if (auto v = get("dimension")) c.dimension = parse_int("dimension", *v);
  if (auto v = get("radius")) c.radius = parse_double("radius", *v);
  if (auto v = get("delays")) {
    c.delays.clear();
    for (const auto& item : split(*v, ',')) c.delays.push_back(parse_int("delays", item));
  }
  if (auto v = get("repetitions")) c.repetitions = parse_int("repetitions", *v);
  if (auto v = get("seed")) {
    const long long s = parse_integer("seed", *v);
    if (s < 0) throw ConfigError("config: seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("stride")) c.stride = parse_int("stride", *v);
  if (auto v = get("threads")) c.threads = parse_int("threads", *v);
  if (auto v = get("out_dir")) c.out_dir = *v;
  if (auto v = get("threshold")) c.threshold = parse_double("threshold", *v);
  if (auto v = get("smoothing_window")) c.smoothing_window = parse_int("smoothing_window", *v);
  if (auto v = get("step")) c.step = parse_step(*v);
  if (auto v = get("eta")) c.eta = parse_double("eta", *v);
  if (auto v = get("step_factor")) c.step_factor = parse_double("step_factor", *v);
  if (auto v = get("amplitude_bound")) c.amplitude_bound = parse_double("amplitude_bound", *v);
  if (auto v = get("frequency_bound")) c.frequency_bound = parse_double("frequency_bound", *v);
  if (auto v = get("init_low")) c.init_low = parse_double("init_low", *v);
  if (auto v = get("init_high")) c.init_high = parse_double("init_high", *v);
  if (auto v = get("samples")) c.samples = parse_int("samples", *v);
  if (auto v = get("drift_scale")) c.drift_scale = parse_double("drift_scale", *v);
  if (auto v = get("drift_exponents")) {
    c.drift_exponents.clear();
    for (const auto& item : split(*v, ',')) c.drift_exponents.push_back(parse_double("drift_exponents", item));
  }
  if (auto v = get("qf_drift_factor")) c.qf_drift_factor = parse_double("qf_drift_factor", *v);
  if (auto v = get("subsolver_tol")) c.subsolver_tol = parse_double("subsolver_tol", *v);
  if (auto v = get("subsolver_max_iter")) c.subsolver_max_iter = parse_int("subsolver_max_iter", *v);
  if (auto v = get("h_scale")) {
    c.h_scale = parse_double("h_scale", *v);
    for (auto& o : c.oracles) {
      if (o.zeroth_order()) o.scale = c.h_scale;
    }
  }
  if (auto v = get("oracles")) {
    c.oracles.clear();
    for (const auto& item : split(*v, ',')) c.oracles.push_back(OracleSpec::parse(item, c.h_scale));
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> settings;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!settings.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  ExperimentConfig base;
  if (auto it = settings.find("experiment"); it != settings.end()) base = preset(it->second);
  ExperimentConfig c = apply_settings(base, settings);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_text(const ExperimentConfig& c) {
  std::vector<std::string> oracles;
  for (const auto& o : c.oracles) oracles.push_back(oracle_text(o));
  std::string out;
  auto line = [&](const char* key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  line("experiment", c.experiment);
  line("family", family_name(c.family));
  line("horizon", fmt::format("{}", c.horizon));
  line("dimension", fmt::format("{}", c.dimension));
  line("radius", fmt::format("{}", c.radius));
  line("delays", join(c.delays));
  line("repetitions", fmt::format("{}", c.repetitions));
  line("seed", fmt::format("{}", c.seed));
  line("stride", fmt::format("{}", c.stride));
  line("threads", fmt::format("{}", c.threads));
  line("out_dir", c.out_dir.string());
  line("threshold", fmt::format("{}", c.threshold));
  line("smoothing_window", fmt::format("{}", c.smoothing_window));
  line("step", step_name(c.step));
  if (c.step == StepRule::Constant) line("eta", fmt::format("{}", c.eta));
  line("step_factor", fmt::format("{}", c.step_factor));
  line("amplitude_bound", fmt::format("{}", c.amplitude_bound));
  line("frequency_bound", fmt::format("{}", c.frequency_bound));
  line("init_low", fmt::format("{}", c.init_low));
  line("init_high", fmt::format("{}", c.init_high));
  line("samples", fmt::format("{}", c.samples));
  line("drift_scale", fmt::format("{}", c.drift_scale));
  line("drift_exponents", join(c.drift_exponents));
  line("qf_drift_factor", fmt::format("{}", c.qf_drift_factor));
  line("subsolver_tol", fmt::format("{}", c.subsolver_tol));
  line("subsolver_max_iter", fmt::format("{}", c.subsolver_max_iter));
  line("h_scale", fmt::format("{}", c.h_scale));
  line("oracles", join(oracles));
  return out;
}

}  // namespace dogd
