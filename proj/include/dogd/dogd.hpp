#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "dogd/analysis.hpp"
#include "dogd/delay.hpp"
#include "dogd/geometry.hpp"
#include "dogd/losses.hpp"
#include "dogd/oracles.hpp"

namespace dogd {

// ---------------------------------------------------------------------------
// Step sizes. A run uses one constant eta.

/// sqrt(2R(2R + 3V) / (T L^2 (5d - 4))).
double step_size_lipschitz_optimal(double R, double L, int T, int d, double V);

/// factor * 2 kappa / ((d + 2 sqrt(d)(d-1)) Gamma).
double step_size_weakly_smooth(double kappa, double Gamma, int d, double factor = 0.99);

struct ConstantEta {
  double eta = 0.0;
};
struct LipschitzOptimal {
  double R = 0.0;
  double L = 0.0;
  int T = 1;
  int d = 1;
  double V = 0.0;
};
struct WeaklySmoothSafe {
  double kappa = 1.0;
  double Gamma = 0.0;
  int d = 1;
  double factor = 0.99;
};

using StepSizePolicy = std::variant<ConstantEta, LipschitzOptimal, WeaklySmoothSafe>;

double step_size(const StepSizePolicy& policy);

// ---------------------------------------------------------------------------
// Update rule.

struct StepResult {
  Vector next;
  /// x'_{t+1} = x_t - eta sum r_k; equals x_t when nothing arrived.
  Vector pre_projection;
  bool updated = false;
};

/// x_{t+1} = P(x_t - eta sum_{k in F_t} r_k) when `arrived` is nonempty, else x_t.
/// Estimates are summed in the order given.
StepResult step(const Vector& x, const std::vector<Feedback>& arrived, double eta, const ConvexSet& set);

// ---------------------------------------------------------------------------
// Runner.

struct RunnerOptions {
  OracleKind oracle = ExactOracle{};
  /// G certificate attached to difference-oracle error bounds.
  std::optional<double> smoothness;
  bool keep_trajectory = false;
};

/// Incremental DOGD: the caller supplies each round's loss, so several runners
/// can share one loss stream in lockstep.
class DelayedOgd {
 public:
  /// Iterates are projected onto `projection_set`; difference-oracle queries
  /// must stay inside `query_domain` (usually the full ball).
  DelayedOgd(std::shared_ptr<const ConvexSet> projection_set,
             std::shared_ptr<const ConvexSet> query_domain, const Vector& x1, double eta,
             DelaySchedule schedule, RunnerOptions options = {});

  /// Round t = round() of [1, T]: records f_t(x_t) - f_t(x*_t), queries the
  /// oracle at x_t, then applies whatever arrives at the end of round t.
  void play_round(const Loss& loss, double minimum_value, const Vector& minimizer);

  /// Virtual rounds T+1 .. T+d_max-1: drains the buffer without recording regret.
  void finish();

  int round() const { return round_; }
  bool done() const { return finished_; }
  const Vector& iterate() const { return x_; }
  double eta() const { return eta_; }
  const DelaySchedule& schedule() const { return schedule_; }
  const RegretLedger& ledger() const { return ledger_; }
  /// x_1, x_2, ... including virtual updates (only with keep_trajectory).
  const std::vector<Vector>& trajectory() const { return trajectory_; }
  /// Last step taken (diagnostics).
  const std::optional<StepResult>& last_step() const { return last_step_; }
  const std::vector<Feedback>& last_arrivals() const { return last_arrivals_; }
  /// Wall-clock seconds spent inside oracle queries.
  double oracle_seconds() const { return oracle_seconds_; }

 private:
  void deliver(int t);

  std::shared_ptr<const ConvexSet> set_;
  std::shared_ptr<const ConvexSet> domain_;
  Vector x_;
  double eta_;
  DelaySchedule schedule_;
  RunnerOptions options_;
  FeedbackBuffer buffer_;
  RegretLedger ledger_;
  std::vector<Vector> trajectory_;
  std::optional<StepResult> last_step_;
  std::vector<Feedback> last_arrivals_;
  int round_ = 1;
  bool finished_ = false;
  double oracle_seconds_ = 0.0;
};

/// Source of per-round losses with known minimizers.
class LossStream {
 public:
  virtual ~LossStream() = default;
  virtual int dimension() const = 0;
  /// Moves to round t; called with t = 1, 2, ... in order.
  virtual void advance(int t) = 0;
  virtual const Loss& loss() const = 0;
  virtual const Vector& minimizer() const = 0;
  virtual double minimum_value() const = 0;
};

/// Pre-built losses, minimizers and minimum values.
class FixedLossStream : public LossStream {
 public:
  FixedLossStream(std::vector<std::shared_ptr<const Loss>> losses, std::vector<Vector> minimizers);

  int dimension() const override { return losses_.front()->dimension(); }
  void advance(int t) override;
  const Loss& loss() const override { return *losses_[current_]; }
  const Vector& minimizer() const override { return minimizers_[current_]; }
  double minimum_value() const override { return minima_[current_]; }
  int size() const { return static_cast<int>(losses_.size()); }

 private:
  std::vector<std::shared_ptr<const Loss>> losses_;
  std::vector<Vector> minimizers_;
  std::vector<double> minima_;
  std::size_t current_ = 0;
};

struct RunResult {
  std::vector<Vector> trajectory;
  RegretLedger ledger;
  double eta = 0.0;
  double oracle_seconds = 0.0;
};

/// Runs rounds 1..T (T = schedule.horizon()) plus the virtual rounds. With a
/// zeroth-order oracle iterates are projected onto X_h, h = max_t h_t.
RunResult run(LossStream& stream, const OracleKind& oracle, const DelaySchedule& schedule,
              const StepSizePolicy& policy, const Ball& set, const Vector& x1,
              std::optional<double> smoothness = std::nullopt);

/// (1/T) sum_{t=1}^T x_t over the first T entries.
Vector average_iterate(const std::vector<Vector>& trajectory, int T);

// ---------------------------------------------------------------------------
// Offline subsolver.

struct OfflineOptions {
  double rel_tol = 1e-6;
  int max_iter = 100000;
  /// When set, gradients are replaced by forward differences with h_k = h(k)
  /// and iterates are projected onto X_h, h = h(1) (decreasing schedules).
  std::optional<PowerSchedule> zeroth_order;
};

struct OfflineResult {
  Vector x;
  /// Average of the iterates x_1..x_K produced (x_init excluded).
  Vector average;
  int iterations = 0;
  bool converged = false;
  std::int64_t function_evaluations = 0;
};

/// Projected gradient descent from x_init with constant eta, stopped when
/// ||x_{k+1} - x_k|| / max(1, ||x_k||) < rel_tol.
OfflineResult offline_solve(const Loss& loss, const Vector& x_init, double eta, const Ball& set,
                            const OfflineOptions& options = {});

}  // namespace dogd
