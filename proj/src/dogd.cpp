#include "dogd/dogd.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dogd {

double step_size_lipschitz_optimal(double R, double L, int T, int d, double V) {
  if (!(R > 0.0) || !(L > 0.0) || T < 1 || d < 1 || V < 0.0) {
    throw std::invalid_argument("step_size_lipschitz_optimal: need R, L > 0, T, d >= 1, V >= 0");
  }
  return std::sqrt(2.0 * R * (2.0 * R + 3.0 * V) /
                   (static_cast<double>(T) * L * L * (5.0 * d - 4.0)));
}

double step_size_weakly_smooth(double kappa, double Gamma, int d, double factor) {
  if (!(kappa > 0.0) || kappa > 1.0) {
    throw std::invalid_argument("step_size_weakly_smooth: kappa must lie in (0, 1]");
  }
  if (!(Gamma > 0.0)) throw std::invalid_argument("step_size_weakly_smooth: Gamma must be positive");
  if (d < 1) throw std::invalid_argument("step_size_weakly_smooth: d must be >= 1");
  if (!(factor > 0.0 && factor < 1.0)) {
    throw std::invalid_argument("step_size_weakly_smooth: factor must lie in (0, 1)");
  }
  return factor * 2.0 * kappa / ((d + 2.0 * std::sqrt(static_cast<double>(d)) * (d - 1)) * Gamma);
}

double step_size(const StepSizePolicy& policy) {
  struct Visitor {
    double operator()(const ConstantEta& p) const {
      if (!(p.eta > 0.0) || !std::isfinite(p.eta)) {
        throw std::invalid_argument("ConstantEta: eta must be positive and finite");
      }
      return p.eta;
    }
    double operator()(const LipschitzOptimal& p) const {
      return step_size_lipschitz_optimal(p.R, p.L, p.T, p.d, p.V);
    }
    double operator()(const WeaklySmoothSafe& p) const {
      return step_size_weakly_smooth(p.kappa, p.Gamma, p.d, p.factor);
    }
  };
  return std::visit(Visitor{}, policy);
}

StepResult step(const Vector& x, const std::vector<Feedback>& arrived, double eta, const ConvexSet& set) {
  if (!(eta > 0.0)) throw std::invalid_argument("step: eta must be positive");
  StepResult out;
  if (arrived.empty()) {
    out.next = x;
    out.pre_projection = x;
    return out;
  }
  Vector sum = Vector::Zero(x.size());
  for (const auto& fb : arrived) sum += fb.estimate;
  out.pre_projection = x - eta * sum;
  out.next = set.project(out.pre_projection);
  out.updated = true;
  return out;
}

DelayedOgd::DelayedOgd(std::shared_ptr<const ConvexSet> projection_set,
                       std::shared_ptr<const ConvexSet> query_domain, const Vector& x1, double eta,
                       DelaySchedule schedule, RunnerOptions options)
    : set_(std::move(projection_set)),
      domain_(std::move(query_domain)),
      x_(x1),
      eta_(eta),
      schedule_(std::move(schedule)),
      options_(std::move(options)) {
  if (!set_) throw std::invalid_argument("DelayedOgd: projection set required");
  if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
    throw std::invalid_argument("DelayedOgd: eta must be positive and finite");
  }
  if (x_.size() != set_->dimension()) throw std::invalid_argument("DelayedOgd: x1 dimension mismatch");
  if (!set_->contains(x_, kProjectionTolerance)) {
    throw std::invalid_argument("DelayedOgd: x1 must be feasible");
  }
  if (options_.keep_trajectory) {
    trajectory_.reserve(static_cast<std::size_t>(schedule_.last_round() + 1));
    trajectory_.push_back(x_);
  }
}

void DelayedOgd::deliver(int t) {
  last_arrivals_ = buffer_.take(t);
  last_step_ = step(x_, last_arrivals_, eta_, *set_);
  x_ = last_step_->next;
  if (options_.keep_trajectory) trajectory_.push_back(x_);
}

void DelayedOgd::play_round(const Loss& loss, double minimum_value, const Vector& minimizer) {
  if (finished_ || round_ > schedule_.horizon()) {
    throw std::logic_error("DelayedOgd: all " + std::to_string(schedule_.horizon()) +
                           " rounds already played");
  }
  const int t = round_;
  const auto start = std::chrono::steady_clock::now();
  Feedback fb;
  try {
    fb = query(options_.oracle, loss, x_, t, domain_.get(), options_.smoothness);
  } catch (const InfeasibleQuery& e) {
    throw InfeasibleQuery("round " + std::to_string(t) + ": " + e.what());
  }
  oracle_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double f_x = loss.value(x_);
  ledger_.record(f_x, minimum_value, minimizer, fb.error_bound, fb.query_count);
  fb.arrival_round = arrival_round(t, schedule_.delay(t));
  buffer_.push(std::move(fb));
  deliver(t);
  ++round_;
}

void DelayedOgd::finish() {
  if (finished_) return;
  if (round_ <= schedule_.horizon()) {
    throw std::logic_error("DelayedOgd: finish() called after round " + std::to_string(round_ - 1) +
                           " of " + std::to_string(schedule_.horizon()));
  }
  for (int t = schedule_.horizon() + 1; t <= schedule_.last_round(); ++t) deliver(t);
  if (!buffer_.empty()) throw std::logic_error("DelayedOgd: feedback left undelivered");
  finished_ = true;
}

FixedLossStream::FixedLossStream(std::vector<std::shared_ptr<const Loss>> losses,
                                 std::vector<Vector> minimizers)
    : losses_(std::move(losses)), minimizers_(std::move(minimizers)) {
  if (losses_.empty() || losses_.size() != minimizers_.size()) {
    throw std::invalid_argument("FixedLossStream: need one minimizer per loss");
  }
  minima_.reserve(losses_.size());
  for (std::size_t i = 0; i < losses_.size(); ++i) minima_.push_back(losses_[i]->value(minimizers_[i]));
}

void FixedLossStream::advance(int t) {
  if (t < 1 || t > size()) throw std::out_of_range("FixedLossStream: round out of range");
  current_ = static_cast<std::size_t>(t - 1);
}

RunResult run(LossStream& stream, const OracleKind& oracle, const DelaySchedule& schedule,
              const StepSizePolicy& policy, const Ball& set, const Vector& x1,
              std::optional<double> smoothness) {
  const int T = schedule.horizon();
  auto ball = std::make_shared<const Ball>(set);
  std::shared_ptr<const ConvexSet> projection_set = ball;
  if (is_zeroth_order(oracle)) {
    projection_set = std::make_shared<const ShrunkenBall>(shrink(set, max_discretization(oracle, T)));
  }
  RunnerOptions options;
  options.oracle = oracle;
  options.smoothness = smoothness;
  options.keep_trajectory = true;
  DelayedOgd runner(projection_set, ball, projection_set->project(x1), step_size(policy), schedule,
                    options);
  for (int t = 1; t <= T; ++t) {
    stream.advance(t);
    runner.play_round(stream.loss(), stream.minimum_value(), stream.minimizer());
  }
  runner.finish();
  RunResult out;
  out.trajectory = runner.trajectory();
  out.ledger = runner.ledger();
  out.eta = runner.eta();
  out.oracle_seconds = runner.oracle_seconds();
  return out;
}

Vector average_iterate(const std::vector<Vector>& trajectory, int T) {
  if (T < 1 || static_cast<std::size_t>(T) > trajectory.size()) {
    throw std::invalid_argument("average_iterate: trajectory shorter than T");
  }
  Vector sum = Vector::Zero(trajectory.front().size());
  for (int t = 0; t < T; ++t) sum += trajectory[static_cast<std::size_t>(t)];
  return sum / static_cast<double>(T);
}

OfflineResult offline_solve(const Loss& loss, const Vector& x_init, double eta, const Ball& set,
                            const OfflineOptions& options) {
  if (!(eta > 0.0)) throw std::invalid_argument("offline_solve: eta must be positive");
  if (!(options.rel_tol > 0.0) || options.max_iter < 1) {
    throw std::invalid_argument("offline_solve: need rel_tol > 0 and max_iter >= 1");
  }
  std::unique_ptr<ConvexSet> projection;
  if (options.zeroth_order) {
    projection = std::make_unique<ShrunkenBall>(shrink(set, options.zeroth_order->max_over(1)));
  } else {
    projection = std::make_unique<Ball>(set);
  }
  if (!set.contains(x_init, kProjectionTolerance)) {
    throw std::invalid_argument("offline_solve: x_init must be feasible");
  }
  OfflineResult out;
  Vector x = projection->project(x_init);
  Vector sum = Vector::Zero(x.size());
  Vector grad(x.size());
  for (int k = 1; k <= options.max_iter; ++k) {
    if (options.zeroth_order) {
      grad = fd_estimate(loss, x, options.zeroth_order->at(k), &set).estimate;
      out.function_evaluations += loss.dimension() + 1;
    } else {
      grad = loss.gradient(x);
    }
    Vector next = projection->project(x - eta * grad);
    const double change = (next - x).norm() / std::max(1.0, x.norm());
    x = std::move(next);
    sum += x;
    out.iterations = k;
    if (change < options.rel_tol) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  out.average = sum / static_cast<double>(out.iterations);
  return out;
}

}  // namespace dogd
