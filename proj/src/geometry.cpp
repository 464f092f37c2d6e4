#include "dogd/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dogd {

namespace {

void check_input(const Vector& x, int dimension) {
  if (x.size() != dimension) {
    throw std::invalid_argument("projection: expected dimension " + std::to_string(dimension) +
                                ", got " + std::to_string(x.size()));
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("projection: input vector has non-finite entries");
  }
}

}  // namespace

Vector project_onto_radius(const Vector& x, double radius) {
  const double norm = x.norm();
  if (norm <= radius) return x;
  Vector y = x * (radius / norm);
  // One ulp of overshoot is possible after scaling; pull it back.
  double shrink = 1.0;
  while (y.norm() > radius) {
    shrink = std::nextafter(shrink, 0.0);
    y = x * (radius / norm * shrink);
  }
  return y;
}

Ball::Ball(double radius, int dimension) : radius_(radius), dimension_(dimension) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("Ball: radius must be positive and finite");
  }
  if (dimension < 1) throw std::invalid_argument("Ball: dimension must be >= 1");
}

Vector Ball::project(const Vector& x) const {
  check_input(x, dimension_);
  return project_onto_radius(x, radius_);
}

bool Ball::contains(const Vector& x, double tol) const {
  if (tol < 0.0) throw std::invalid_argument("contains: tolerance must be nonnegative");
  return x.size() == dimension_ && x.norm() <= radius_ + tol;
}

ShrunkenBall::ShrunkenBall(Ball base, double h) : base_(base), h_(h) {
  if (!(h > 0.0) || !(h < base_.radius())) {
    throw std::invalid_argument("shrink: h must lie in (0, R)");
  }
}

Vector ShrunkenBall::project(const Vector& x) const {
  check_input(x, dimension());
  return project_onto_radius(x, effective_radius());
}

bool ShrunkenBall::contains(const Vector& x, double tol) const {
  if (tol < 0.0) throw std::invalid_argument("contains: tolerance must be nonnegative");
  return x.size() == dimension() && x.norm() <= effective_radius() + tol;
}

ShrunkenBall shrink(const Ball& set, double h) { return ShrunkenBall(set, h); }

}  // namespace dogd
