#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "dogd/geometry.hpp"
#include "dogd/losses.hpp"

namespace dogd::test {

inline Vector gaussian(int p, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(p);
  for (int i = 0; i < p; ++i) v[i] = n(rng);
  return v;
}

/// Uniform point in the ball of radius r.
inline Vector in_ball(int p, double r, Rng& rng) {
  Vector v = gaussian(p, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return v.normalized() * (r * std::pow(u(rng), 1.0 / p));
}

inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double h = 1e-6) {
  Vector g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1e-12, std::max(a.norm(), b.norm()));
}

/// Gradient-check error: relative, falling back to absolute below a floor so
/// near-stationary points do not amplify finite-difference noise.
inline double gradient_check_error(const Loss& loss, const Vector& x) {
  const Vector g = loss.gradient(x);
  const Vector fd = central_difference([&](const Vector& y) { return loss.value(y); }, x);
  return (g - fd).norm() / std::max(1e-4, g.norm());
}

/// f(x) = 1/2 <Qx, x> + <c, x> + k with gradient Qx + c.
class QuadraticLoss : public Loss {
 public:
  QuadraticLoss(Matrix Q, Vector c, double k = 0.0) : Q_(std::move(Q)), c_(std::move(c)), k_(k) {}
  int dimension() const override { return static_cast<int>(c_.size()); }
  double value(const Vector& x) const override { return 0.5 * x.dot(Q_ * x) + c_.dot(x) + k_; }
  Vector gradient(const Vector& x) const override { return Q_ * x + c_; }

 private:
  Matrix Q_;
  Vector c_;
  double k_;
};

/// 1/2 ||x - c||^2.
inline QuadraticLoss centered_quadratic(const Vector& c) {
  return QuadraticLoss(Matrix::Identity(c.size(), c.size()), -c, 0.5 * c.squaredNorm());
}

}  // namespace dogd::test
