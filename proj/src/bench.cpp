#include "dogd/bench.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <atomic>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace dogd {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

Vector gaussian(Rng& rng, int n) {
  boost::random::normal_distribution<double> normal;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

// ---------------------------------------------------------------------------

class RadialEnvironment : public Environment {
 public:
  RadialEnvironment(const ExperimentConfig& c, std::uint64_t seed)
      : p_(c.dimension),
        radius_(c.radius),
        m1_(c.amplitude_bound),
        m2_(c.frequency_bound),
        rng_(derive_seed(seed, 1)),
        minimizer_(Vector::Zero(c.dimension)) {
    Rng init(derive_seed(seed, 4));
    boost::random::uniform_real_distribution<double> u(c.init_low, c.init_high);
    Vector x(p_);
    for (int i = 0; i < p_; ++i) x[i] = u(init);
    x1_ = project_onto_radius(x, radius_);
    const RadialLoss probe(Vector::Zero(p_), Vector::Zero(p_), radius_, m1_, m2_);
    const LossConstants k = radial_constants(probe);
    certificates_.kappa = k.quasar;
    certificates_.lipschitz = k.lipschitz;
  }

  int streams() const override { return 1; }

  void advance(int) override {
    boost::random::uniform_real_distribution<double> ua(0.0, m1_);
    boost::random::uniform_real_distribution<double> ub(-m2_, m2_);
    Vector a(p_), b(p_);
    for (int i = 0; i < p_; ++i) a[i] = ua(rng_);
    for (int i = 0; i < p_; ++i) b[i] = ub(rng_);
    loss_ = std::make_unique<RadialLoss>(std::move(a), std::move(b), radius_, m1_, m2_);
  }

  const Loss& loss(int) const override { return *loss_; }
  const Vector& minimizer(int) const override { return minimizer_; }
  double minimum_value(int) const override { return 0.0; }
  StreamCertificates certificates() const override { return certificates_; }
  const Vector& initial_point() const override { return x1_; }

 private:
  int p_;
  double radius_;
  double m1_;
  double m2_;
  Rng rng_;
  Vector minimizer_;
  Vector x1_;
  StreamCertificates certificates_;
  std::unique_ptr<RadialLoss> loss_;
};

// ---------------------------------------------------------------------------

// Sample rows are drawn as sqrt(chi2_p) times a uniform direction, which is
// N(0, I) in law and lets the norms be pre-scanned for Gamma before round 1.
class GlmEnvironment : public Environment {
 public:
  GlmEnvironment(const ExperimentConfig& c, std::uint64_t seed)
      : p_(c.dimension),
        m_(c.samples),
        radius_(c.radius),
        ball_(c.radius, c.dimension),
        norm_seed_(derive_seed(seed, 1)),
        norm_rng_(norm_seed_),
        dir_rng_(derive_seed(seed, 2)) {
    boost::random::chi_squared_distribution<double> chi2(p_);
    double max_sq = 0.0;
    const long long draws = static_cast<long long>(c.horizon) * m_;
    for (long long i = 0; i < draws; ++i) max_sq = std::max(max_sq, chi2(norm_rng_));
    norm_rng_.seed(norm_seed_);

    certificates_.kappa = glm_quasar_constant(radius_);
    certificates_.weak_smoothness = max_sq / 8.0;

    Rng init(derive_seed(seed, 4));
    const Vector star = ball_.project(gaussian(init, p_));
    Vector x = gaussian(init, p_);
    x1_ = ball_.project(x / x.norm());

    const std::uint64_t drift_seed = derive_seed(seed, 3);
    for (double a : c.drift_exponents) {
      drifts_.emplace_back(a, c.drift_scale, ball_, Rng(drift_seed));
      minimizers_.push_back(star);
    }
    losses_.resize(drifts_.size());
    minima_.assign(drifts_.size(), 0.0);
  }

  int streams() const override { return static_cast<int>(drifts_.size()); }

  void advance(int t) override {
    if (t > 1) {
      for (std::size_t k = 0; k < drifts_.size(); ++k) minimizers_[k] = drifts_[k].step(minimizers_[k], t - 1);
    }
    boost::random::chi_squared_distribution<double> chi2(p_);
    boost::random::normal_distribution<double> normal;
    Matrix A(m_, p_);
    Vector dir(p_);
    for (int i = 0; i < m_; ++i) {
      const double r = std::sqrt(chi2(norm_rng_));
      for (int j = 0; j < p_; ++j) dir[j] = normal(dir_rng_);
      A.row(i) = (r / dir.norm()) * dir.transpose();
    }
    for (std::size_t k = 0; k < drifts_.size(); ++k) {
      const Vector z = A * minimizers_[k];
      Vector targets(m_);
      for (int i = 0; i < m_; ++i) targets[i] = logistic(z[i]);
      Matrix samples = (k + 1 == drifts_.size()) ? std::move(A) : A;
      losses_[k] = std::make_unique<GlmLoss>(std::move(samples), std::move(targets), radius_);
      minima_[k] = losses_[k]->value(minimizers_[k]);
    }
  }

  const Loss& loss(int k) const override { return *losses_[static_cast<std::size_t>(k)]; }
  const Vector& minimizer(int k) const override { return minimizers_[static_cast<std::size_t>(k)]; }
  double minimum_value(int k) const override { return minima_[static_cast<std::size_t>(k)]; }
  StreamCertificates certificates() const override { return certificates_; }
  const Vector& initial_point() const override { return x1_; }

 private:
  int p_;
  int m_;
  double radius_;
  Ball ball_;
  std::uint64_t norm_seed_;
  Rng norm_rng_;
  Rng dir_rng_;
  Vector x1_;
  StreamCertificates certificates_;
  std::vector<MinimizerDrift> drifts_;
  std::vector<Vector> minimizers_;
  std::vector<std::unique_ptr<GlmLoss>> losses_;
  std::vector<double> minima_;
};

// ---------------------------------------------------------------------------

class QuadFracEnvironment : public Environment {
 public:
  QuadFracEnvironment(const ExperimentConfig& c, std::uint64_t seed)
      : ball_(c.radius, c.dimension),
        drift_(c.dimension, c.radius, c.qf_drift_factor, Rng(derive_seed(seed, 1))),
        state_(drift_.initial()),
        minimizer_(Vector::Zero(c.dimension)) {
    Rng init(derive_seed(seed, 4));
    x1_ = ball_.project(gaussian(init, c.dimension));
    // With B = 0 and ||A|| = 1, ||a|| = ||b|| = 0.1 fixed by renormalization,
    // the certificates are the same every round.
    const double nb = QuadFracDrift::kTargetNorm;
    const double M = 2.0 * nb * c.radius + QuadFracDrift::kFloor;
    certificates_.kappa = QuadFracDrift::kFloor / M;
    const double G = qf_smoothness_bound(1.0, QuadFracDrift::kTargetNorm, 0.0, nb, QuadFracDrift::kAlpha,
                                         QuadFracDrift::kFloor, c.radius);
    certificates_.smoothness = G;
    certificates_.weak_smoothness = 2.0 * G;
    options_.rel_tol = c.subsolver_tol;
    options_.max_iter = c.subsolver_max_iter;
  }

  int streams() const override { return 1; }

  void advance(int t) override {
    state_ = drift_.next(state_, t);
    loss_ = std::make_unique<QuadFracLoss>(drift_.loss(state_));
    const OfflineResult r = offline_solve(*loss_, minimizer_, 1.0 / *certificates_.smoothness, ball_, options_);
    if (!r.converged) {
      throw std::runtime_error("round " + std::to_string(t) + ": subsolver did not converge within " +
                               std::to_string(r.iterations) + " iterations");
    }
    minimizer_ = r.x;
    minimum_ = loss_->value(minimizer_);
  }

  const Loss& loss(int) const override { return *loss_; }
  const Vector& minimizer(int) const override { return minimizer_; }
  double minimum_value(int) const override { return minimum_; }
  StreamCertificates certificates() const override { return certificates_; }
  const Vector& initial_point() const override { return x1_; }

 private:
  Ball ball_;
  QuadFracDrift drift_;
  QuadFracDriftState state_;
  std::unique_ptr<QuadFracLoss> loss_;
  Vector minimizer_;
  double minimum_ = 0.0;
  Vector x1_;
  StreamCertificates certificates_;
  OfflineOptions options_;
};

double run_step_size(const ExperimentConfig& c, const StreamCertificates& k, int d) {
  StepRule rule = c.step;
  if (rule == StepRule::Auto) {
    rule = c.family == LossFamily::Radial ? StepRule::LipschitzOptimal : StepRule::WeaklySmooth;
  }
  switch (rule) {
    case StepRule::Constant:
      return step_size(ConstantEta{c.eta});
    case StepRule::LipschitzOptimal:
      if (!k.lipschitz) throw ConfigError("step = lipschitz: no Lipschitz certificate");
      return step_size(LipschitzOptimal{c.radius, *k.lipschitz, c.horizon, d, 0.0});
    case StepRule::WeaklySmooth:
      if (!k.weak_smoothness) throw ConfigError("step = weakly-smooth: no weak-smoothness certificate");
      return step_size(WeaklySmoothSafe{k.kappa, *k.weak_smoothness, d, c.step_factor});
    case StepRule::Auto:
      break;
  }
  throw std::logic_error("unreachable step rule");
}

OracleKind make_oracle(const OracleSpec& spec, int dimension, std::uint64_t seed) {
  switch (spec.kind) {
    case OracleSpec::Kind::Exact:
      return ExactOracle{};
    case OracleSpec::Kind::ForwardDifference:
      return ForwardDifferenceOracle{PowerSchedule{spec.scale, spec.exponent}};
    case OracleSpec::Kind::SymmetricDifference:
      return SymmetricDifferenceOracle{PowerSchedule{spec.scale, spec.exponent}};
    case OracleSpec::Kind::Noisy: {
      NoisePattern pattern = NoisePattern::fixed_axis();
      if (spec.pattern == NoisePattern::Kind::CyclicAxis) pattern = NoisePattern::cyclic_axis();
      if (spec.pattern == NoisePattern::Kind::AlternatingRandom) {
        Rng rng(seed);
        pattern = NoisePattern::alternating_random(dimension, rng);
      }
      return NoisyOracle{PowerSchedule{spec.scale, spec.exponent}, pattern};
    }
  }
  throw std::logic_error("unreachable oracle kind");
}

}  // namespace

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config, std::uint64_t rep_seed) {
  switch (config.family) {
    case LossFamily::Radial:
      return std::make_unique<RadialEnvironment>(config, rep_seed);
    case LossFamily::Glm:
      return std::make_unique<GlmEnvironment>(config, rep_seed);
    case LossFamily::QuadFrac:
      return std::make_unique<QuadFracEnvironment>(config, rep_seed);
  }
  throw std::logic_error("unreachable family");
}

std::vector<std::string> variant_labels(const ExperimentConfig& c) {
  std::vector<std::string> out;
  for (double a : c.drift_exponents) {
    for (const auto& o : c.oracles) {
      std::string label = c.experiment;
      if (c.drift_exponents.size() > 1) label += fmt::format("/a={}", a);
      if (c.oracles.size() > 1) label += "/" + o.label();
      out.push_back(label);
    }
  }
  return out;
}

std::vector<RunOutcome> run_repetition(const ExperimentConfig& c, int rep) {
  const std::uint64_t rep_seed = c.seed + static_cast<std::uint64_t>(rep);
  auto env = make_environment(c, derive_seed(rep_seed, 0));
  const StreamCertificates certs = env->certificates();
  const auto labels = variant_labels(c);
  auto ball = std::make_shared<const Ball>(c.radius, c.dimension);

  struct Slot {
    RunOutcome outcome;
    int stream = 0;
    std::unique_ptr<DelayedOgd> runner;
  };
  std::vector<Slot> slots;
  const int n_oracles = static_cast<int>(c.oracles.size());
  for (int k = 0; k < env->streams(); ++k) {
    for (int j = 0; j < n_oracles; ++j) {
      const int variant = k * n_oracles + j;
      const OracleSpec& spec = c.oracles[static_cast<std::size_t>(j)];
      for (int d : c.delays) {
        Slot s;
        s.stream = k;
        s.outcome.label = labels[static_cast<std::size_t>(variant)];
        s.outcome.variant = variant;
        s.outcome.delay = d;
        s.outcome.rep = rep;
        s.outcome.seed = rep_seed;
        s.outcome.certificates = certs;
        s.outcome.dimension = c.dimension;
        s.outcome.radius = c.radius;
        s.outcome.eta = run_step_size(c, certs, d);
        s.outcome.zeroth_order = spec.zeroth_order();
        RunnerOptions options;
        options.oracle = make_oracle(spec, c.dimension, derive_seed(rep_seed, 2, static_cast<std::uint64_t>(variant)));
        options.smoothness = certs.smoothness;
        std::shared_ptr<const ConvexSet> projection = ball;
        if (spec.zeroth_order()) {
          projection = std::make_shared<const ShrunkenBall>(
              shrink(*ball, max_discretization(options.oracle, c.horizon)));
          const PowerSchedule h{spec.scale, spec.exponent};
          CompensatedSum hs, hs2;
          for (int t = 1; t <= c.horizon; ++t) {
            const double v = h.at(t);
            hs.add(v);
            hs2.add(v * v);
          }
          s.outcome.h_sum = hs.value();
          s.outcome.h_sq_sum = hs2.value();
        }
        DelaySchedule schedule =
            uniform_delay_schedule(d, c.horizon, derive_seed(rep_seed, 1, static_cast<std::uint64_t>(d)));
        s.outcome.max_delay = schedule.max_delay();
        s.runner = std::make_unique<DelayedOgd>(projection, ball, projection->project(env->initial_point()),
                                                s.outcome.eta, std::move(schedule), options);
        slots.push_back(std::move(s));
      }
    }
  }

  using Clock = std::chrono::steady_clock;
  for (int t = 1; t <= c.horizon; ++t) {
    try {
      env->advance(t);
    } catch (const std::exception& e) {
      throw std::runtime_error("repetition " + std::to_string(rep) + ", delay " + fmt::format("{}", fmt::join(c.delays, ",")) +
                               ": " + e.what());
    }
    for (auto& s : slots) {
      const auto start = Clock::now();
      try {
        s.runner->play_round(env->loss(s.stream), env->minimum_value(s.stream), env->minimizer(s.stream));
      } catch (const std::exception& e) {
        throw std::runtime_error("repetition " + std::to_string(rep) + ", delay " +
                                 std::to_string(s.outcome.delay) + ", variant '" + s.outcome.label +
                                 "': " + e.what());
      }
      s.outcome.seconds += std::chrono::duration<double>(Clock::now() - start).count();
    }
  }

  std::vector<RunOutcome> out;
  out.reserve(slots.size());
  for (auto& s : slots) {
    const auto start = Clock::now();
    s.runner->finish();
    s.outcome.seconds += std::chrono::duration<double>(Clock::now() - start).count();
    const RegretLedger& ledger = s.runner->ledger();
    s.outcome.gaps = ledger.gaps();
    s.outcome.cumulative = ledger.cumulative_regret();
    s.outcome.path_variation = ledger.path_variation();
    s.outcome.errors = ledger.cumulative_errors();
    s.outcome.queries = ledger.queries();
    out.push_back(std::move(s.outcome));
  }
  return out;
}

std::vector<RunRecord> make_records(const RunOutcome& run, int window, int stride) {
  std::vector<RunRecord> out;
  const int T = static_cast<int>(run.gaps.size());
  const std::vector<double> smoothed = trailing_mean(run.gaps, window);
  for (int t = 1; t <= T; ++t) {
    if (t != 1 && t % stride != 0 && t != T) continue;
    const auto i = static_cast<std::size_t>(t - 1);
    RunRecord r;
    r.experiment = run.label;
    r.rep = run.rep;
    r.delay = run.delay;
    r.t = t;
    r.regret_cum = run.cumulative[i];
    r.regret_avg = run.cumulative[i] / t;
    r.gap_smoothed = smoothed[i];
    r.eta = run.eta;
    r.seed = run.seed;
    out.push_back(std::move(r));
  }
  return out;
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  CompensatedSum s;
  for (double v : values) s.add(v);
  const double mean = s.value() / static_cast<double>(values.size());
  CompensatedSum sq;
  for (double v : values) sq.add((v - mean) * (v - mean));
  return std::sqrt(sq.value() / static_cast<double>(values.size() - 1));
}

std::optional<int> mean_crossing(const std::vector<std::optional<int>>& crossings) {
  if (crossings.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& c : crossings) {
    if (!c) return std::nullopt;
    sum += *c;
  }
  return static_cast<int>(std::lround(sum / static_cast<double>(crossings.size())));
}

std::vector<SummaryRow> summarize_runs(const std::vector<RunOutcome>& runs, double threshold, int window) {
  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::vector<const RunOutcome*>> groups;
  for (const auto& r : runs) {
    const auto key = std::make_pair(r.label, r.delay);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const auto& members = groups[key];
    const std::size_t T = members.front()->gaps.size();
    std::vector<std::optional<int>> crossings;
    std::vector<double> finals;
    double seconds = 0.0;
    double final_regret = 0.0;
    for (const RunOutcome* r : members) {
      if (r->gaps.size() != T) throw std::invalid_argument("summarize_runs: horizon mismatch within a group");
      crossings.push_back(threshold_iteration(trailing_mean(r->gaps, window), threshold));
      finals.push_back(r->cumulative.back() / static_cast<double>(T));
      seconds += r->seconds;
      final_regret += r->cumulative.back();
    }
    const double n = static_cast<double>(members.size());
    SummaryRow row;
    row.experiment = key.first;
    row.delay = key.second;
    row.iter_threshold = mean_crossing(crossings);
    row.std_final = sample_std(finals);
    row.time_mean_s = seconds / n;
    row.mean_final_regret = final_regret / n;
    out.push_back(std::move(row));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& c,
                                const std::function<void(const std::string&)>& progress) {
  c.validate();
  const int reps = c.repetitions;
  unsigned threads = c.threads > 0 ? static_cast<unsigned>(c.threads) : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(reps));

  std::vector<std::vector<RunOutcome>> per_rep(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (int rep = next++; rep < reps; rep = next++) {
      try {
        per_rep[static_cast<std::size_t>(rep)] = run_repetition(c, rep);
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress(c.experiment + ": repetition " + std::to_string(rep + 1) + "/" + std::to_string(reps) + " done");
        }
      } catch (...) {
        errors[static_cast<std::size_t>(rep)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  const std::size_t per = per_rep.front().size();
  for (std::size_t slot = 0; slot < per; ++slot) {
    for (auto& runs : per_rep) result.runs.push_back(std::move(runs[slot]));
  }
  const int stride = c.effective_stride();
  for (const auto& run : result.runs) {
    auto rec = make_records(run, c.smoothing_window, stride);
    result.records.insert(result.records.end(), std::make_move_iterator(rec.begin()),
                          std::make_move_iterator(rec.end()));
  }
  result.summary = summarize_runs(result.runs, c.threshold, c.smoothing_window);
  return result;
}

}  // namespace dogd
