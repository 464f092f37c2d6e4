#include "dogd/losses.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_on_sphere.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>
#include <string>

namespace dogd {

void LossConstants::validate() const {
  if (!(quasar > 0.0 && quasar <= 1.0)) {
    throw std::invalid_argument("LossConstants: quasar constant must lie in (0, 1]");
  }
  for (const auto& c : {lipschitz, weak_smoothness, smoothness, strong_quasar}) {
    if (c && (!std::isfinite(*c) || *c < 0.0)) {
      throw std::invalid_argument("LossConstants: constants must be finite and nonnegative");
    }
  }
}

// ---------------------------------------------------------------------------
// Radial

RadialLoss::RadialLoss(Vector amplitudes, Vector frequencies, double radius,
                       double amplitude_bound, double frequency_bound)
    : amplitudes_(std::move(amplitudes)),
      frequencies_(std::move(frequencies)),
      radius_(radius),
      amplitude_bound_(amplitude_bound),
      frequency_bound_(frequency_bound) {
  if (amplitudes_.size() < 1 || amplitudes_.size() != frequencies_.size()) {
    throw std::invalid_argument("RadialLoss: coefficient vectors must be non-empty and equal length");
  }
  if (!(radius_ > 0.0)) throw std::invalid_argument("RadialLoss: radius must be positive");
  if (amplitude_bound_ < 0.0 || frequency_bound_ < 0.0) {
    throw std::invalid_argument("RadialLoss: coefficient bounds must be nonnegative");
  }
  if (amplitudes_.minCoeff() < 0.0 || amplitudes_.maxCoeff() > amplitude_bound_) {
    throw std::invalid_argument("RadialLoss: amplitudes outside [0, m1]");
  }
  if (frequencies_.cwiseAbs().maxCoeff() > frequency_bound_) {
    throw std::invalid_argument("RadialLoss: frequencies outside [-m2, m2]");
  }
}

double RadialLoss::value(const Vector& x) const {
  const double n = x.norm();
  if (n == 0.0) return 0.0;
  const double g = n * n / (1.0 + n * n);
  double q = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = std::sin(frequencies_[i] * x[i] / n);
    q += amplitudes_[i] * s * s;
  }
  return g * q;
}

double RadialLoss::value_and_gradient(const Vector& x, Vector& grad) const {
  const Eigen::Index p = x.size();
  grad.setZero(p);
  const double n = x.norm();
  if (n == 0.0) return 0.0;

  const double n2 = n * n;
  const double g = n2 / (1.0 + n2);
  const double g_prime = 2.0 * n / ((1.0 + n2) * (1.0 + n2));

  double q = 0.0;
  double u_dot_grad_q = 0.0;
  Vector grad_q(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double u = x[i] / n;
    const double arg = frequencies_[i] * u;
    const double s = std::sin(arg);
    q += amplitudes_[i] * s * s;
    grad_q[i] = amplitudes_[i] * frequencies_[i] * std::sin(2.0 * arg);
    u_dot_grad_q += u * grad_q[i];
  }
  // u g'(n) q(u) + (g(n)/n) (I - u u^T) grad q(u)
  const double radial = g_prime * q - (g / n) * u_dot_grad_q;
  grad = (radial / n) * x + (g / n) * grad_q;
  return g * q;
}

Vector RadialLoss::gradient(const Vector& x) const {
  Vector grad;
  value_and_gradient(x, grad);
  return grad;
}

double radial_value(const RadialLoss& loss, const Vector& x) { return loss.value(x); }
Vector radial_gradient(const RadialLoss& loss, const Vector& x) { return loss.gradient(x); }

LossConstants radial_constants(const RadialLoss& loss) {
  const double p = loss.dimension();
  const double m1 = loss.amplitude_bound();
  const double m2 = loss.frequency_bound();
  LossConstants c;
  c.lipschitz = m1 * p + m1 * m2 * std::sqrt(p);
  c.quasar = 1.0 / (1.0 + loss.radius() * loss.radius());
  return c;
}

// ---------------------------------------------------------------------------
// GLM

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_derivative(double z) {
  const double s = logistic(z);
  return s * (1.0 - s);
}

GlmLoss::GlmLoss(Matrix samples, Vector targets, double radius)
    : samples_(std::move(samples)), targets_(std::move(targets)), radius_(radius) {
  if (samples_.rows() < 1 || samples_.cols() < 1) {
    throw std::invalid_argument("GlmLoss: need at least one sample and one feature");
  }
  if (targets_.size() != samples_.rows()) {
    throw std::invalid_argument("GlmLoss: one target per sample row is required");
  }
  if (!(targets_.array() > 0.0).all() || !(targets_.array() < 1.0).all()) {
    throw std::invalid_argument("GlmLoss: targets must lie strictly inside (0, 1)");
  }
  if (!(radius_ > 0.0)) throw std::invalid_argument("GlmLoss: radius must be positive");
}

double GlmLoss::value(const Vector& x) const {
  const Vector z = samples_ * x;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double r = logistic(z[i]) - targets_[i];
    sum += r * r;
  }
  return sum / (2.0 * static_cast<double>(samples_.rows()));
}

double GlmLoss::value_and_gradient(const Vector& x, Vector& grad) const {
  const Eigen::Index m = samples_.rows();
  Vector weights = samples_ * x;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = logistic(weights[i]);
    const double r = s - targets_[i];
    sum += r * r;
    weights[i] = s * (1.0 - s) * r;
  }
  grad.noalias() = samples_.transpose() * weights;
  grad /= static_cast<double>(m);
  return sum / (2.0 * static_cast<double>(m));
}

Vector GlmLoss::gradient(const Vector& x) const {
  Vector grad;
  value_and_gradient(x, grad);
  return grad;
}

double glm_value(const GlmLoss& loss, const Vector& x) { return loss.value(x); }
Vector glm_gradient(const GlmLoss& loss, const Vector& x) { return loss.gradient(x); }

double glm_quasar_constant(double radius) {
  return std::min(1.0, 8.0 * logistic_derivative(radius));
}

LossConstants glm_constants(const GlmLoss& loss) {
  LossConstants c;
  c.weak_smoothness = loss.samples().rowwise().squaredNorm().maxCoeff() / 8.0;
  c.quasar = glm_quasar_constant(loss.radius());
  return c;
}

// ---------------------------------------------------------------------------
// Quadratic fractional

double symmetric_min_eigenvalue(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolve did not converge");
  }
  return solver.eigenvalues()[0];
}

double symmetric_spectral_norm(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolve did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

namespace {

bool is_symmetric(const Matrix& S) {
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  return (S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

// Relative slack on the certified denominator floor; rounding in <b, x> on the
// boundary of the ball would otherwise trip it.
constexpr double kDenominatorSlack = 1e-12;

}  // namespace

QuadFracLoss::QuadFracLoss(QuadFracParams params) : params_(std::move(params)) {
  const Eigen::Index p = params_.a.size();
  if (p < 1) throw std::invalid_argument("QuadFracLoss: dimension must be >= 1");
  if (params_.A.rows() != p || params_.A.cols() != p || params_.B.rows() != p ||
      params_.B.cols() != p || params_.b.size() != p) {
    throw std::invalid_argument("QuadFracLoss: inconsistent parameter shapes");
  }
  if (!is_symmetric(params_.A) || !is_symmetric(params_.B)) {
    throw std::invalid_argument("QuadFracLoss: A and B must be symmetric");
  }
  if (!(params_.m_lo > 0.0) || !(params_.m_lo < params_.M_hi)) {
    throw std::invalid_argument("QuadFracLoss: require 0 < m_lo < M_hi");
  }
  if (!(params_.radius > 0.0)) throw std::invalid_argument("QuadFracLoss: radius must be positive");

  zero_B_ = params_.B.isZero(0.0);
  const double R = params_.radius;
  if (zero_B_) {
    const double spread = params_.b.norm() * R;
    const double lo = params_.beta - spread;
    const double hi = params_.beta + spread;
    if (lo < params_.m_lo * (1.0 - kDenominatorSlack) || hi > params_.M_hi * (1.0 + kDenominatorSlack)) {
      throw std::invalid_argument("QuadFracLoss: denominator leaves [m_lo, M_hi] on the ball");
    }
  } else {
    Rng rng(0x5eed);
    boost::random::uniform_on_sphere<double> sphere(static_cast<int>(p));
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 4096; ++k) {
      const auto dir = sphere(rng);
      const double r = (k % 2 == 0) ? R : R * std::pow(unit(rng), 1.0 / static_cast<double>(p));
      Vector x(p);
      for (Eigen::Index i = 0; i < p; ++i) x[i] = r * dir[static_cast<std::size_t>(i)];
      const double q = denominator(x);
      if (q < params_.m_lo * (1.0 - kDenominatorSlack) || q > params_.M_hi * (1.0 + kDenominatorSlack)) {
        throw std::invalid_argument("QuadFracLoss: denominator leaves [m_lo, M_hi] on the ball");
      }
    }
  }
}

double QuadFracLoss::numerator(const Vector& x) const {
  return 0.5 * x.dot(params_.A * x) + params_.a.dot(x) + params_.alpha;
}

double QuadFracLoss::denominator(const Vector& x) const {
  double q = params_.b.dot(x) + params_.beta;
  if (!zero_B_) q += 0.5 * x.dot(params_.B * x);
  return q;
}

double QuadFracLoss::checked_denominator(double q) const {
  if (!(q >= params_.m_lo * (1.0 - kDenominatorSlack))) {
    throw DomainError("QuadFracLoss: denominator " + std::to_string(q) + " below floor " +
                      std::to_string(params_.m_lo));
  }
  return q;
}

double QuadFracLoss::value(const Vector& x) const {
  const double q = checked_denominator(denominator(x));
  return numerator(x) / q;
}

double QuadFracLoss::value_and_gradient(const Vector& x, Vector& grad) const {
  const Vector Ax = params_.A * x;
  const double g = 0.5 * x.dot(Ax) + params_.a.dot(x) + params_.alpha;
  Vector Bx_b = params_.b;
  double q = params_.b.dot(x) + params_.beta;
  if (!zero_B_) {
    const Vector Bx = params_.B * x;
    q += 0.5 * x.dot(Bx);
    Bx_b += Bx;
  }
  checked_denominator(q);
  grad = (q * (Ax + params_.a) - g * Bx_b) / (q * q);
  return g / q;
}

Vector QuadFracLoss::gradient(const Vector& x) const {
  Vector grad;
  value_and_gradient(x, grad);
  return grad;
}

double qf_value(const QuadFracLoss& loss, const Vector& x) { return loss.value(x); }
Vector qf_gradient(const QuadFracLoss& loss, const Vector& x) { return loss.gradient(x); }

double qf_smoothness_bound(double norm_A, double norm_a, double norm_B, double norm_b,
                           double alpha, double m_lo, double radius) {
  const double R = radius;
  const double m = m_lo;
  const double lin_B = norm_B * R + norm_b;
  const double lin_A = norm_A * R + norm_a;
  return norm_A * norm_A / m + 2.0 * lin_B * lin_A / (m * m) +
         (norm_A * R * R + 2.0 * norm_a * R + 2.0 * alpha) * lin_B * lin_B / (m * m * m) +
         (0.5 * norm_A * R * R + norm_a * R + alpha) * norm_B * norm_B / (m * m);
}

std::pair<double, double> QuadFracCertificates::lambda_family(double lambda) const {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("lambda_family: lambda must lie in (0, 1)");
  }
  return {lambda * kappa_, kappa_ * (1.0 / lambda - 1.0) * sigma_min / (4.0 * M_hi_)};
}

QuadFracCertificates qf_certificates(const QuadFracLoss& loss) {
  const auto& prm = loss.params();
  Eigen::LLT<Matrix> llt(prm.A);
  const double sigma_min = symmetric_min_eigenvalue(prm.A);
  if (llt.info() != Eigen::Success || !(sigma_min > 0.0)) {
    throw std::invalid_argument("qf_certificates: A is not positive definite");
  }
  QuadFracCertificates out;
  out.sigma_min = sigma_min;
  out.kappa_ = prm.m_lo / prm.M_hi;
  out.M_hi_ = prm.M_hi;
  out.constants.quasar = out.kappa_;
  out.constants.strong_quasar = sigma_min / prm.m_lo;
  out.strong_quasar_kappa = out.kappa_ / 2.0;
  out.quasiconvex_modulus = sigma_min / prm.M_hi;
  const double norm_B = loss.has_zero_B() ? 0.0 : symmetric_spectral_norm(prm.B);
  out.constants.smoothness = qf_smoothness_bound(symmetric_spectral_norm(prm.A), prm.a.norm(),
                                                 norm_B, prm.b.norm(), prm.alpha, prm.m_lo,
                                                 prm.radius);
  return out;
}

// ---------------------------------------------------------------------------
// Drift

namespace {

Vector gaussian_vector(Rng& rng, Eigen::Index n) {
  boost::random::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace

MinimizerDrift::MinimizerDrift(double exponent, double scale, Ball set, Rng rng)
    : exponent_(exponent), scale_(scale), set_(set), rng_(std::move(rng)) {
  if (!(exponent_ > 0.0)) throw std::invalid_argument("MinimizerDrift: exponent must be positive");
  if (scale_ < 0.0) throw std::invalid_argument("MinimizerDrift: scale must be nonnegative");
}

Vector MinimizerDrift::step(const Vector& current, int t) {
  if (t < 1) throw std::invalid_argument("MinimizerDrift: round index must be >= 1");
  Vector v = gaussian_vector(rng_, current.size());
  if (scale_ == 0.0) return current;
  const double step = scale_ * std::pow(static_cast<double>(t), -exponent_);
  return set_.project(current + step * v);
}

Vector drift_step(MinimizerDrift& drift, const Vector& current, int t) {
  return drift.step(current, t);
}

QuadFracDrift::QuadFracDrift(int dimension, double radius, double factor, Rng rng)
    : dimension_(dimension), radius_(radius), factor_(factor), rng_(std::move(rng)) {
  if (dimension_ < 1) throw std::invalid_argument("QuadFracDrift: dimension must be >= 1");
  if (!(radius_ > 0.0)) throw std::invalid_argument("QuadFracDrift: radius must be positive");
  if (factor_ < 0.0) throw std::invalid_argument("QuadFracDrift: factor must be nonnegative");
}

Matrix QuadFracDrift::random_unit_pd() {
  boost::random::normal_distribution<double> normal;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Matrix M(dimension_, dimension_);
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, j) = normal(rng_);
    }
    Matrix P = M.transpose() * M;
    P = 0.5 * (P + P.transpose());
    const double norm = symmetric_spectral_norm(P);
    if (!(norm > 0.0)) continue;
    P /= norm;
    if (Eigen::LLT<Matrix>(P).info() == Eigen::Success) return P;
  }
  throw std::runtime_error("QuadFracDrift: could not draw a positive definite perturbation");
}

QuadFracDriftState QuadFracDrift::initial() {
  QuadFracDriftState s;
  s.A = random_unit_pd();
  s.a = gaussian_vector(rng_, dimension_);
  s.a *= kTargetNorm / s.a.norm();
  s.b = gaussian_vector(rng_, dimension_);
  s.b *= kTargetNorm / s.b.norm();
  return s;
}

QuadFracDriftState QuadFracDrift::next(const QuadFracDriftState& previous, int t) {
  if (t < 1) throw std::invalid_argument("QuadFracDrift: round index must be >= 1");
  if (factor_ == 0.0) return previous;
  const double c = factor_ / std::sqrt(static_cast<double>(t));
  QuadFracDriftState s;
  for (int attempt = 0;; ++attempt) {
    Matrix A = previous.A + c * random_unit_pd();
    A = 0.5 * (A + A.transpose());
    A /= symmetric_spectral_norm(A);
    if (Eigen::LLT<Matrix>(A).info() == Eigen::Success) {
      s.A = std::move(A);
      break;
    }
    if (attempt + 1 >= kMaxRetries) {
      throw std::runtime_error("QuadFracDrift: lost positive definiteness");
    }
  }
  Vector a = previous.a + c * gaussian_vector(rng_, dimension_);
  s.a = a / (a.norm() / kTargetNorm);
  Vector b = previous.b + c * gaussian_vector(rng_, dimension_);
  s.b = b / (b.norm() / kTargetNorm);
  return s;
}

QuadFracLoss QuadFracDrift::loss(const QuadFracDriftState& state) const {
  QuadFracParams prm;
  prm.A = state.A;
  prm.a = state.a;
  prm.alpha = kAlpha;
  prm.B = Matrix::Zero(dimension_, dimension_);
  prm.b = state.b;
  const double spread = state.b.norm() * radius_;
  prm.beta = spread + kFloor;
  prm.m_lo = kFloor;
  prm.M_hi = spread + prm.beta;
  prm.radius = radius_;
  return QuadFracLoss(std::move(prm));
}

QuadFracDriftState qf_drift(QuadFracDrift& drift, const QuadFracDriftState& previous, int t) {
  return drift.next(previous, t);
}

}  // namespace dogd
