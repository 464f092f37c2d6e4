#include "dogd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dogd {

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(const std::vector<double>& values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

void RegretLedger::record(double loss_at_iterate, double loss_at_minimizer, const Vector& minimizer,
                          std::optional<double> error_bound, std::int64_t queries) {
  if (!std::isfinite(loss_at_iterate)) {
    throw std::invalid_argument("RegretLedger: non-finite loss at round " +
                                std::to_string(rounds() + 1));
  }
  losses_.push_back(loss_at_iterate);
  minima_.push_back(loss_at_minimizer);
  if (last_minimizer_) path_.add((*last_minimizer_ - minimizer).norm());
  last_minimizer_ = minimizer;
  if (error_bound) {
    if (*error_bound < 0.0) throw std::invalid_argument("RegretLedger: negative error bound");
    delta_.add(*error_bound);
    lambda_.add(*error_bound * *error_bound);
  } else {
    errors_certified_ = false;
  }
  queries_ += queries;
}

std::vector<double> RegretLedger::gaps() const {
  std::vector<double> out(losses_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = losses_[i] - minima_[i];
  return out;
}

std::vector<double> RegretLedger::cumulative_regret() const {
  std::vector<double> out(losses_.size());
  CompensatedSum s;
  for (std::size_t i = 0; i < out.size(); ++i) {
    s.add(losses_[i] - minima_[i]);
    out[i] = s.value();
  }
  return out;
}

std::optional<std::pair<double, double>> RegretLedger::cumulative_errors() const {
  if (!errors_certified_) return std::nullopt;
  return std::make_pair(delta_.value(), lambda_.value());
}

double dynamic_regret(const RegretLedger& ledger) {
  CompensatedSum s;
  for (int t = 0; t < ledger.rounds(); ++t) {
    const double m = ledger.minima()[static_cast<std::size_t>(t)];
    if (std::isnan(m)) {
      throw std::invalid_argument("dynamic_regret: minimum value missing for round " +
                                  std::to_string(t + 1));
    }
    s.add(ledger.losses()[static_cast<std::size_t>(t)] - m);
  }
  return s.value();
}

double path_variation(const std::vector<Vector>& minimizers) {
  CompensatedSum s;
  for (std::size_t t = 1; t < minimizers.size(); ++t) s.add((minimizers[t - 1] - minimizers[t]).norm());
  return s.value();
}

std::pair<double, double> cumulative_errors(const std::vector<double>& deltas) {
  CompensatedSum delta;
  CompensatedSum lambda;
  for (double v : deltas) {
    if (v < 0.0) throw std::invalid_argument("cumulative_errors: delta_t must be nonnegative");
    delta.add(v);
    lambda.add(v * v);
  }
  return {delta.value(), lambda.value()};
}

std::pair<double, double> bandit_error_sums(int dimension, double smoothness,
                                            const std::vector<double>& steps) {
  CompensatedSum h;
  CompensatedSum h2;
  for (double v : steps) {
    h.add(v);
    h2.add(v * v);
  }
  const double p = dimension;
  return {std::sqrt(p) * smoothness / 2.0 * h.value(),
          p * smoothness * smoothness / 4.0 * h2.value()};
}

namespace {

void require_common(const BoundInputs& in, const char* who) {
  if (!(in.eta > 0.0)) throw std::invalid_argument(std::string(who) + ": eta must be positive");
  if (!(in.kappa > 0.0) || in.kappa > 1.0) {
    throw std::invalid_argument(std::string(who) + ": kappa must lie in (0, 1]");
  }
  if (in.d < 1) throw std::invalid_argument(std::string(who) + ": d must be >= 1");
  if (in.T < 1) throw std::invalid_argument(std::string(who) + ": T must be >= 1");
  if (in.R < 0.0 || in.V < 0.0 || in.Delta < 0.0 || in.Lambda < 0.0) {
    throw std::invalid_argument(std::string(who) + ": R, V, Delta, Lambda must be nonnegative");
  }
}

double delay_root(int d) { return std::sqrt(static_cast<double>(d)) * (d - 1); }

}  // namespace

double bound_lipschitz(const BoundInputs& in) {
  require_common(in, "bound_lipschitz");
  const double R = in.R, eta = in.eta, k = in.kappa, L = in.L, d = in.d, T = in.T;
  return 2.0 * R * R / (eta * k) + (3.0 * R + eta * L * (d - 1.0)) * in.V / (eta * k) +
         (L * L * d + 4.0 * (d - 1.0) * L * L) * eta * T / (2.0 * k) + eta * d * in.Lambda / (2.0 * k) +
         (eta * d * L + 2.0 * R + 2.0 * eta * (d - 1.0) * L) * in.Delta / k;
}

double bound_lipschitz_exact_gradient(const BoundInputs& in) {
  require_common(in, "bound_lipschitz_exact_gradient");
  const double R = in.R, eta = in.eta, k = in.kappa, L = in.L, d = in.d, T = in.T;
  return 2.0 * R * R / (eta * k) + 3.0 * R * in.V / (eta * k) + eta * L * L * T * d / (2.0 * k) +
         L * (d - 1.0) * in.V / k + 2.0 * eta * (d - 1.0) * L * L * T / k;
}

double quadratic_bound(double a, double b, double c) {
  if (!(a > 0.0)) throw std::invalid_argument("quadratic_bound: a must be positive");
  return (b * b + 2.0 * a * c + b * std::sqrt(b * b + 4.0 * a * c)) / (2.0 * a * a);
}

double weakly_smooth_alpha_general(double kappa, double Gamma, int d) {
  return (d + 4.0 * delay_root(d)) * Gamma / (2.0 * kappa);
}

double weakly_smooth_alpha_exact(double kappa, double Gamma, int d) {
  return (d + 2.0 * delay_root(d)) * Gamma / (2.0 * kappa);
}

double bandit_alpha(double kappa, double G, int d) { return (d + 4.0 * delay_root(d)) * G / kappa; }

QuadraticBound bound_weakly_smooth(const BoundInputs& in, double alpha) {
  require_common(in, "bound_weakly_smooth");
  QuadraticBound out;
  out.a = 1.0 - alpha * in.eta;
  if (!(out.a > 0.0)) {
    throw std::invalid_argument("bound_weakly_smooth: step size violates the threshold (a = " +
                                std::to_string(out.a) + ")");
  }
  const double R = in.R, eta = in.eta, k = in.kappa, d = in.d;
  out.b = std::sqrt(2.0 * R * (d - 1.0) * in.Gamma * in.V) / k +
          ((std::sqrt(2.0 * d) * (d - 1.0) * eta + eta * d) / k) * std::sqrt(in.Gamma * in.Lambda);
  out.c = 2.0 * R * R / k + 3.0 * R * in.V / k + eta * d * in.Lambda / (2.0 * k) +
          2.0 * R * in.Delta / k;
  out.value = quadratic_bound(out.a, out.b, out.c);
  return out;
}

QuadraticBound bound_bandit(const BoundInputs& in, double alpha1) {
  if (in.h_sum < 0.0 || in.h_sq_sum < 0.0) {
    throw std::invalid_argument("bound_bandit: h sums must be nonnegative");
  }
  BoundInputs reduced = in;
  const double p = in.p;
  reduced.Gamma = 2.0 * in.G;
  reduced.Delta = std::sqrt(p) * in.G / 2.0 * in.h_sum;
  reduced.Lambda = p * in.G * in.G / 4.0 * in.h_sq_sum;
  return bound_weakly_smooth(reduced, alpha1);
}

std::vector<double> average_regret(const std::vector<double>& cumulative) {
  std::vector<double> out(cumulative.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = cumulative[i] / static_cast<double>(i + 1);
  return out;
}

std::vector<double> trailing_mean(const std::vector<double>& series, int window) {
  if (window < 1) throw std::invalid_argument("trailing_mean: window must be >= 1");
  std::vector<double> out(series.size());
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
    CompensatedSum s;
    for (std::size_t j = lo; j <= i; ++j) s.add(series[j]);
    out[i] = s.value() / static_cast<double>(i + 1 - lo);
  }
  return out;
}

std::optional<int> threshold_iteration(const std::vector<double>& series, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("threshold_iteration: eps must be positive");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] < eps) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

std::pair<std::vector<int>, std::vector<int>> delayed_double_sum_counts(int T, int d, int floor) {
  if (d < 1) throw std::invalid_argument("delayed_double_sum: d must be >= 1");
  if (T < 0) throw std::invalid_argument("delayed_double_sum: T must be >= 0");
  std::vector<int> lhs(static_cast<std::size_t>(T), 0);
  std::vector<int> rhs(static_cast<std::size_t>(T), 0);
  for (int t = 1; t <= T - 1; ++t) {
    for (int k = t + 1; k <= std::min(T, t + d - 1); ++k) ++lhs[static_cast<std::size_t>(k - 1)];
  }
  for (int k = 2; k <= T; ++k) {
    for (int t = std::max(floor, k - d + 1); t <= k - 1; ++t) ++rhs[static_cast<std::size_t>(k - 1)];
  }
  return {lhs, rhs};
}

std::pair<double, double> delayed_double_sum(const std::vector<double>& a, int d, int floor) {
  if (d < 1) throw std::invalid_argument("delayed_double_sum: d must be >= 1");
  const int T = static_cast<int>(a.size());
  auto at = [&](int k) { return a[static_cast<std::size_t>(k - 1)]; };
  double lhs = 0.0;
  for (int t = 1; t <= T - 1; ++t) {
    for (int k = t + 1; k <= std::min(T, t + d - 1); ++k) lhs += at(k);
  }
  double rhs = 0.0;
  for (int k = 2; k <= T; ++k) {
    for (int t = std::max(floor, k - d + 1); t <= k - 1; ++t) rhs += at(k);
  }
  return {lhs, rhs};
}

}  // namespace dogd
