#pragma once

#include <Eigen/Core>

namespace dogd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute slack allowed on the norm constraint after a projection.
inline constexpr double kProjectionTolerance = 1e-12;

/// A closed convex decision set that can be projected onto.
///
/// Only origin-centred balls ship; new sets implement this interface.
class ConvexSet {
 public:
  virtual ~ConvexSet() = default;

  virtual int dimension() const = 0;

  /// Euclidean projection. Throws std::invalid_argument on non-finite input
  /// or a dimension mismatch.
  virtual Vector project(const Vector& x) const = 0;

  virtual bool contains(const Vector& x, double tol) const = 0;
};

/// Origin-centred ball {x : ||x|| <= R} in R^p.
class Ball : public ConvexSet {
 public:
  Ball(double radius, int dimension);

  double radius() const { return radius_; }
  int dimension() const override { return dimension_; }

  Vector project(const Vector& x) const override;
  bool contains(const Vector& x, double tol) const override;

 private:
  double radius_;
  int dimension_;
};

/// The contraction X_h = (1 - h/R) X of a ball, used by finite-difference
/// oracles: for x in X_h every point x + h e_i stays inside the base ball.
class ShrunkenBall : public ConvexSet {
 public:
  ShrunkenBall(Ball base, double h);

  const Ball& base() const { return base_; }
  double h() const { return h_; }
  double scaling() const { return 1.0 - h_ / base_.radius(); }
  double effective_radius() const { return base_.radius() - h_; }
  int dimension() const override { return base_.dimension(); }

  Vector project(const Vector& x) const override;
  bool contains(const Vector& x, double tol) const override;

 private:
  Ball base_;
  double h_;
};

/// Builds X_h. Requires 0 < h < R.
ShrunkenBall shrink(const Ball& set, double h);

inline Vector project(const ConvexSet& set, const Vector& x) { return set.project(x); }

inline bool contains(const ConvexSet& set, const Vector& x, double tol = kProjectionTolerance) {
  return set.contains(x, tol);
}

/// Radial scaling onto the ball of the given radius.
Vector project_onto_radius(const Vector& x, double radius);

}  // namespace dogd
