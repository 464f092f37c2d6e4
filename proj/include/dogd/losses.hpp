#pragma once

#include <optional>
#include <random>
#include <stdexcept>

#include "dogd/geometry.hpp"

namespace dogd {

/// Raised when a loss is evaluated outside the region where it is defined
/// (quadratic-fractional denominators below their certified floor).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Regularity certificates of a loss on the feasible set. Absent entries are
/// unknown; consumers that need them must refuse rather than guess.
struct LossConstants {
  std::optional<double> lipschitz;        // L
  std::optional<double> weak_smoothness;  // Gamma
  std::optional<double> smoothness;       // G
  double quasar = 1.0;                    // kappa in (0, 1]
  std::optional<double> strong_quasar;    // gamma

  void validate() const;
};

/// A differentiable per-round loss on R^p.
class Loss {
 public:
  virtual ~Loss() = default;

  virtual int dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// Value and gradient together; families override it when the two share work.
  virtual double value_and_gradient(const Vector& x, Vector& grad) const {
    grad = gradient(x);
    return value(x);
  }
};

// ---------------------------------------------------------------------------
// Radial product loss f(x) = g(||x||) q(x/||x||) with g(t) = t^2/(1+t^2) and
// q(u) = sum_i a_i sin^2(b_i u_i). Minimized at the origin with value 0.

class RadialLoss : public Loss {
 public:
  /// `amplitude_bound` (m1) and `frequency_bound` (m2) are the ranges the
  /// coefficients were drawn from; entries are validated against them.
  RadialLoss(Vector amplitudes, Vector frequencies, double radius, double amplitude_bound,
             double frequency_bound);

  int dimension() const override { return static_cast<int>(amplitudes_.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

  const Vector& amplitudes() const { return amplitudes_; }
  const Vector& frequencies() const { return frequencies_; }
  double radius() const { return radius_; }
  double amplitude_bound() const { return amplitude_bound_; }
  double frequency_bound() const { return frequency_bound_; }

 private:
  Vector amplitudes_;
  Vector frequencies_;
  double radius_;
  double amplitude_bound_;
  double frequency_bound_;
};

double radial_value(const RadialLoss& loss, const Vector& x);
Vector radial_gradient(const RadialLoss& loss, const Vector& x);

/// L = m1 p + m1 m2 sqrt(p), kappa = 1/(1 + R^2).
LossConstants radial_constants(const RadialLoss& loss);

// ---------------------------------------------------------------------------
// Logistic GLM squared loss f(x) = (1/2m) sum_i (sigma(<a_i, x>) - b_i)^2.

double logistic(double z);
double logistic_derivative(double z);

class GlmLoss : public Loss {
 public:
  /// Rows of `samples` are the a_i. Targets must lie strictly inside (0, 1).
  GlmLoss(Matrix samples, Vector targets, double radius);

  int dimension() const override { return static_cast<int>(samples_.cols()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

  const Matrix& samples() const { return samples_; }
  const Vector& targets() const { return targets_; }
  double radius() const { return radius_; }

 private:
  Matrix samples_;
  Vector targets_;
  double radius_;
};

double glm_value(const GlmLoss& loss, const Vector& x);
Vector glm_gradient(const GlmLoss& loss, const Vector& x);

/// Gamma = max_i ||a_i||^2 / 8, kappa = min(1, 8 sigma'(R)).
LossConstants glm_constants(const GlmLoss& loss);

/// kappa = min(1, 8 sigma'(R)) on its own, shared with stream-level certificates.
double glm_quasar_constant(double radius);

// ---------------------------------------------------------------------------
// Quadratic fractional loss f(x) = g(x)/q(x),
//   g(x) = 1/2 <Ax, x> + <a, x> + alpha,  q(x) = 1/2 <Bx, x> + <b, x> + beta,
// on the ball of radius R where m_lo <= q <= M_hi.

struct QuadFracParams {
  Matrix A;
  Vector a;
  double alpha = 0.0;
  Matrix B;
  Vector b;
  double beta = 1.0;
  double m_lo = 1.0;
  double M_hi = 2.0;
  double radius = 1.0;
};

class QuadFracLoss : public Loss {
 public:
  /// Validates shapes, symmetry, m_lo < M_hi, and that the denominator stays in
  /// [m_lo, M_hi] on the ball (exactly when B = 0, by sampling otherwise).
  explicit QuadFracLoss(QuadFracParams params);

  int dimension() const override { return static_cast<int>(params_.a.size()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

  double numerator(const Vector& x) const;
  double denominator(const Vector& x) const;

  const QuadFracParams& params() const { return params_; }
  bool has_zero_B() const { return zero_B_; }

 private:
  double checked_denominator(double q) const;

  QuadFracParams params_;
  bool zero_B_;
};

double qf_value(const QuadFracLoss& loss, const Vector& x);
Vector qf_gradient(const QuadFracLoss& loss, const Vector& x);

struct QuadFracCertificates {
  LossConstants constants;   // quasar = m/M, smoothness = G, strong_quasar = sigma_min(A)/m
  double strong_quasar_kappa = 0.0;  // kappa / 2, paired with constants.strong_quasar
  double quasiconvex_modulus = 0.0;  // sigma_min(A) / M
  double sigma_min = 0.0;

  /// (lambda kappa, kappa (1/lambda - 1) sigma_min(A) / (4M)) for lambda in (0, 1).
  std::pair<double, double> lambda_family(double lambda) const;

 private:
  friend QuadFracCertificates qf_certificates(const QuadFracLoss& loss);
  double kappa_ = 0.0;
  double M_hi_ = 0.0;
};

/// Computable constants of the quadratic fractional family. The caller asserts
/// one of the sign conditions on (g, B); B = 0 always qualifies.
/// Throws std::invalid_argument when A is not positive definite.
QuadFracCertificates qf_certificates(const QuadFracLoss& loss);

/// Smoothness constant of the quadratic fractional family on a ball of radius R.
double qf_smoothness_bound(double norm_A, double norm_a, double norm_B, double norm_b,
                           double alpha, double m_lo, double radius);

/// Smallest eigenvalue of a symmetric matrix (tridiagonal QL).
double symmetric_min_eigenvalue(const Matrix& S);
/// Spectral norm of a symmetric matrix.
double symmetric_spectral_norm(const Matrix& S);

// ---------------------------------------------------------------------------
// Drifting minimizers.

using Rng = std::mt19937_64;

/// x*_{t+1} = P_X(x*_t + scale t^{-exponent} v_t), v_t ~ N(0, I).
class MinimizerDrift {
 public:
  MinimizerDrift(double exponent, double scale, Ball set, Rng rng);

  Vector step(const Vector& current, int t);

  double exponent() const { return exponent_; }
  double scale() const { return scale_; }
  const Ball& set() const { return set_; }

 private:
  double exponent_;
  double scale_;
  Ball set_;
  Rng rng_;
};

Vector drift_step(MinimizerDrift& drift, const Vector& current, int t);

/// Parameters of the drifting quadratic fractional stream (B = 0).
struct QuadFracDriftState {
  Matrix A;  // unit spectral norm, positive definite
  Vector a;  // norm 0.1
  Vector b;  // norm 0.1
};

/// Random walk on (A, a, b) with renormalization after every perturbation:
///   A_t = (A + c V)/||A + c V||, a_t = (a + c v2)/(10 ||a + c v2||), same for b,
/// where c = factor t^{-1/2} and V is a random unit-norm positive definite matrix.
class QuadFracDrift {
 public:
  QuadFracDrift(int dimension, double radius, double factor, Rng rng);

  /// Draws the initial state: A_0 random PD of unit norm, a_0 and b_0 Gaussian
  /// rescaled to norm 0.1.
  QuadFracDriftState initial();

  /// Advances to round t (t >= 1).
  QuadFracDriftState next(const QuadFracDriftState& previous, int t);

  /// Loss for a state: alpha = 10, beta = ||b|| R + 100, m = 100, M = ||b|| R + beta.
  QuadFracLoss loss(const QuadFracDriftState& state) const;

  double radius() const { return radius_; }
  double factor() const { return factor_; }

  static constexpr double kAlpha = 10.0;
  static constexpr double kFloor = 100.0;
  static constexpr double kTargetNorm = 0.1;
  static constexpr int kMaxRetries = 16;

 private:
  Matrix random_unit_pd();

  int dimension_;
  double radius_;
  double factor_;
  Rng rng_;
};

QuadFracDriftState qf_drift(QuadFracDrift& drift, const QuadFracDriftState& previous, int t);

}  // namespace dogd
