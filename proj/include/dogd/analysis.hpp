#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dogd/geometry.hpp"

namespace dogd {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(const std::vector<double>& values);

/// Per-round accounting of one run over rounds 1..T.
class RegretLedger {
 public:
  /// `loss_at_minimizer` may be NaN when x*_t is unknown; dynamic_regret then refuses.
  /// `error_bound` absent means delta_t is not certified for that round.
  void record(double loss_at_iterate, double loss_at_minimizer, const Vector& minimizer,
              std::optional<double> error_bound, std::int64_t queries);

  int rounds() const { return static_cast<int>(losses_.size()); }
  const std::vector<double>& losses() const { return losses_; }
  const std::vector<double>& minima() const { return minima_; }

  /// f_t(x_t) - f_t(x*_t) per round.
  std::vector<double> gaps() const;
  /// R^NS_t for t = 1..T, compensated.
  std::vector<double> cumulative_regret() const;

  double path_variation() const { return path_.value(); }
  /// (Delta_T, Lambda_T), absent if any round lacked a certified delta.
  std::optional<std::pair<double, double>> cumulative_errors() const;
  std::int64_t queries() const { return queries_; }

 private:
  std::vector<double> losses_;
  std::vector<double> minima_;
  std::optional<Vector> last_minimizer_;
  CompensatedSum path_;
  CompensatedSum delta_;
  CompensatedSum lambda_;
  bool errors_certified_ = true;
  std::int64_t queries_ = 0;
};

/// R^NS_T = sum_t f_t(x_t) - f_t(x*_t). Throws if a minimum value is missing.
double dynamic_regret(const RegretLedger& ledger);

/// V_T = sum_{t<T} ||x*_t - x*_{t+1}||.
double path_variation(const std::vector<Vector>& minimizers);

/// (sum delta_t, sum delta_t^2).
std::pair<double, double> cumulative_errors(const std::vector<double>& deltas);

/// (Delta-bar, Lambda-bar) = ((sqrt(p) G / 2) sum h_t, (p G^2 / 4) sum h_t^2).
std::pair<double, double> bandit_error_sums(int dimension, double smoothness,
                                            const std::vector<double>& steps);

// ---------------------------------------------------------------------------
// Regret bounds.

struct BoundInputs {
  double R = 0.0;
  double kappa = 1.0;
  double L = 0.0;
  double Gamma = 0.0;
  double G = 0.0;
  int d = 1;
  int T = 1;
  double eta = 0.0;
  double V = 0.0;
  double Delta = 0.0;
  double Lambda = 0.0;
  int p = 1;
  double h_sum = 0.0;     // sum h_t
  double h_sq_sum = 0.0;  // sum h_t^2
};

/// 2R^2/(eta kappa) + (3R + eta L (d-1)) V/(eta kappa) + (L^2 d + 4(d-1) L^2) eta T/(2 kappa)
///   + eta d Lambda/(2 kappa) + (eta d L + 2R + 2 eta (d-1) L) Delta/kappa.
double bound_lipschitz(const BoundInputs& in);

/// Exact-gradient form listed term by term:
/// 2R^2/(eta kappa) + 3RV/(eta kappa) + eta L^2 T d/(2 kappa) + L(d-1)V/kappa + 2 eta (d-1) L^2 T/kappa.
double bound_lipschitz_exact_gradient(const BoundInputs& in);

struct QuadraticBound {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double value = 0.0;
};

/// (b^2 + 2ac + b sqrt(b^2 + 4ac)) / (2a^2).
double quadratic_bound(double a, double b, double c);

/// Threshold alpha with a = 1 - alpha eta: (d + 4 sqrt(d)(d-1)) Gamma / (2 kappa).
double weakly_smooth_alpha_general(double kappa, double Gamma, int d);
/// Exact-gradient threshold: (d + 2 sqrt(d)(d-1)) Gamma / (2 kappa).
double weakly_smooth_alpha_exact(double kappa, double Gamma, int d);
/// Bandit threshold alpha_1 = (d + 4 sqrt(d)(d-1)) G / kappa.
double bandit_alpha(double kappa, double G, int d);

/// Weakly smooth bound with
///   b = sqrt(2R(d-1) Gamma V)/kappa + ((sqrt(2d)(d-1) eta + eta d)/kappa) sqrt(Gamma Lambda),
///   c = 2R^2/kappa + 3RV/kappa + eta d Lambda/(2 kappa) + 2R Delta/kappa.
/// Throws if a = 1 - alpha eta <= 0.
QuadraticBound bound_weakly_smooth(const BoundInputs& in, double alpha);

/// Bandit bound: the weakly smooth form at Gamma = 2G, Lambda = Lambda-bar, Delta = Delta-bar
/// built from p, G and the h sums. Throws if a_1 <= 0.
QuadraticBound bound_bandit(const BoundInputs& in, double alpha1);

// ---------------------------------------------------------------------------
// Series helpers.

/// R^NS_t / t.
std::vector<double> average_regret(const std::vector<double>& cumulative);

/// Mean of the last min(window, t) entries at each t.
std::vector<double> trailing_mean(const std::vector<double>& series, int window = 50);

/// Smallest 1-based t with series[t-1] < eps; nullopt when never reached.
std::optional<int> threshold_iteration(const std::vector<double>& series, double eps);

/// Brute-force sides of the double-sum interchange for a_1..a_T (a[0] = a_1):
///   lhs = sum_{t=1}^{T-1} sum_{k=t+1}^{min(T, t+d-1)} a_k,
///   rhs = sum_{k=2}^{T} sum_{t=max(floor, k-d+1)}^{k-1} a_k.
/// The two agree for floor = 1; floor = 2 drops the t = 1 terms of every k <= d.
std::pair<double, double> delayed_double_sum(const std::vector<double>& a, int d, int floor = 1);

/// Multiplicity of each a_k on both sides of the interchange above.
std::pair<std::vector<int>, std::vector<int>> delayed_double_sum_counts(int T, int d, int floor = 1);

}  // namespace dogd
