#pragma once

#include <optional>
#include <stdexcept>
#include <variant>

#include "dogd/geometry.hpp"
#include "dogd/losses.hpp"

namespace dogd {

/// One piece of first-order feedback: the estimate r_k queried in round k,
/// delivered at the end of round k + d_k - 1.
struct Feedback {
  int origin_round = 0;
  Vector estimate;
  int arrival_round = 0;
  /// delta_k bound on ||r_k - grad f_k(x_k)||; absent when it cannot be certified.
  std::optional<double> error_bound;
  int query_count = 0;
};

/// Thrown when a finite-difference oracle would evaluate a loss outside X.
class InfeasibleQuery : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// s * t^{-a}, used for noise levels delta_t and discretization steps h_t.
struct PowerSchedule {
  double scale = 1.0;
  double exponent = 1.0;

  double at(int t) const;
  /// max over t in [1, horizon].
  double max_over(int horizon) const;
};

/// Deterministic direction of the additive gradient error m_t.
class NoisePattern {
 public:
  enum class Kind { FixedAxis, CyclicAxis, AlternatingRandom };

  static NoisePattern fixed_axis() { return NoisePattern(Kind::FixedAxis, {}); }
  static NoisePattern cyclic_axis() { return NoisePattern(Kind::CyclicAxis, {}); }
  /// Alternating sign along `direction`, normalized to a unit vector.
  static NoisePattern alternating(Vector direction);
  /// Alternating sign along a unit vector drawn uniformly from the sphere.
  static NoisePattern alternating_random(int dimension, Rng& rng);

  Kind kind() const { return kind_; }

  /// Unit vector for round t (t >= 1) in R^p.
  Vector direction(int t, int dimension) const;

 private:
  NoisePattern(Kind kind, Vector axis) : kind_(kind), axis_(std::move(axis)) {}

  Kind kind_;
  Vector axis_;
};

Feedback exact_gradient(const Loss& loss, const Vector& x);

/// r = grad f(x) + delta * pattern.direction(round), so ||r - grad f(x)|| = delta.
Feedback noisy_gradient(const Loss& loss, const Vector& x, double delta, const NoisePattern& pattern,
                        int round = 1);

/// (p+1)-point forward-difference estimate. When `domain` is given every query
/// point must lie in it (InfeasibleQuery otherwise). With a known smoothness G
/// the error bound sqrt(p) G h / 2 is attached.
Feedback fd_estimate(const Loss& loss, const Vector& x, double h, const ConvexSet* domain = nullptr,
                     std::optional<double> smoothness = std::nullopt);

/// 2p-point symmetric-difference estimate with the same bound.
Feedback sym_estimate(const Loss& loss, const Vector& x, double h, const ConvexSet* domain = nullptr,
                      std::optional<double> smoothness = std::nullopt);

struct ExactOracle {};
struct NoisyOracle {
  PowerSchedule delta;
  NoisePattern pattern;
};
struct ForwardDifferenceOracle {
  PowerSchedule h;
};
struct SymmetricDifferenceOracle {
  PowerSchedule h;
};

using OracleKind =
    std::variant<ExactOracle, NoisyOracle, ForwardDifferenceOracle, SymmetricDifferenceOracle>;

bool is_zeroth_order(const OracleKind& kind);

/// Largest discretization step over [1, horizon]; zero for first-order oracles.
double max_discretization(const OracleKind& kind, int horizon);

/// Dispatches a round-t query. `domain` is the set the loss is defined on;
/// `smoothness` is the G certificate used for difference-oracle error bounds.
Feedback query(const OracleKind& kind, const Loss& loss, const Vector& x, int round,
               const ConvexSet* domain, std::optional<double> smoothness);

}  // namespace dogd
