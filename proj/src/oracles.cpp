#include "dogd/oracles.hpp"

#include <boost/random/uniform_on_sphere.hpp>
#include <cmath>
#include <string>

namespace dogd {

double PowerSchedule::at(int t) const {
  if (t < 1) throw std::invalid_argument("PowerSchedule: round index must be >= 1");
  return scale * std::pow(static_cast<double>(t), -exponent);
}

double PowerSchedule::max_over(int horizon) const {
  if (horizon < 1) throw std::invalid_argument("PowerSchedule: horizon must be >= 1");
  return exponent >= 0.0 ? at(1) : at(horizon);
}

NoisePattern NoisePattern::alternating(Vector direction) {
  const double n = direction.norm();
  if (!(n > 0.0)) throw std::invalid_argument("NoisePattern: direction must be nonzero");
  return NoisePattern(Kind::AlternatingRandom, direction / n);
}

NoisePattern NoisePattern::alternating_random(int dimension, Rng& rng) {
  boost::random::uniform_on_sphere<double> sphere(dimension);
  const auto v = sphere(rng);
  Vector axis(dimension);
  for (int i = 0; i < dimension; ++i) axis[i] = v[static_cast<std::size_t>(i)];
  return alternating(std::move(axis));
}

Vector NoisePattern::direction(int t, int dimension) const {
  Vector u = Vector::Zero(dimension);
  switch (kind_) {
    case Kind::FixedAxis:
      u[0] = 1.0;
      break;
    case Kind::CyclicAxis:
      u[t % dimension] = 1.0;
      break;
    case Kind::AlternatingRandom:
      if (axis_.size() != dimension) {
        throw std::invalid_argument("NoisePattern: axis dimension mismatch");
      }
      u = (t % 2 == 1) ? axis_ : Vector(-axis_);
      break;
  }
  return u;
}

Feedback exact_gradient(const Loss& loss, const Vector& x) {
  Feedback fb;
  fb.estimate = loss.gradient(x);
  fb.error_bound = 0.0;
  fb.query_count = 1;
  return fb;
}

Feedback noisy_gradient(const Loss& loss, const Vector& x, double delta, const NoisePattern& pattern,
                        int round) {
  if (delta < 0.0) throw std::invalid_argument("noisy_gradient: delta must be nonnegative");
  Feedback fb = exact_gradient(loss, x);
  if (delta > 0.0) fb.estimate += delta * pattern.direction(round, loss.dimension());
  fb.error_bound = delta;
  return fb;
}

namespace {

void check_query_point(const ConvexSet* domain, const Vector& point, const char* who) {
  if (domain != nullptr && !domain->contains(point, kProjectionTolerance)) {
    throw InfeasibleQuery(std::string(who) + ": query point of norm " + std::to_string(point.norm()) +
                          " lies outside the feasible set; project onto X_h first");
  }
}

void check_step(double h, const char* who) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument(std::string(who) + ": step h must be positive and finite");
  }
}

std::optional<double> difference_bound(std::optional<double> smoothness, int p, double h) {
  if (!smoothness) return std::nullopt;
  return std::sqrt(static_cast<double>(p)) * *smoothness * h / 2.0;
}

}  // namespace

Feedback fd_estimate(const Loss& loss, const Vector& x, double h, const ConvexSet* domain,
                     std::optional<double> smoothness) {
  check_step(h, "fd_estimate");
  const int p = loss.dimension();
  check_query_point(domain, x, "fd_estimate");
  const double fx = loss.value(x);
  Feedback fb;
  fb.estimate.resize(p);
  Vector probe = x;
  for (int i = 0; i < p; ++i) {
    probe[i] = x[i] + h;
    check_query_point(domain, probe, "fd_estimate");
    fb.estimate[i] = (loss.value(probe) - fx) / h;
    probe[i] = x[i];
  }
  fb.error_bound = difference_bound(smoothness, p, h);
  fb.query_count = p + 1;
  return fb;
}

Feedback sym_estimate(const Loss& loss, const Vector& x, double h, const ConvexSet* domain,
                      std::optional<double> smoothness) {
  check_step(h, "sym_estimate");
  const int p = loss.dimension();
  Feedback fb;
  fb.estimate.resize(p);
  Vector probe = x;
  for (int i = 0; i < p; ++i) {
    probe[i] = x[i] + h;
    check_query_point(domain, probe, "sym_estimate");
    const double forward = loss.value(probe);
    probe[i] = x[i] - h;
    check_query_point(domain, probe, "sym_estimate");
    const double backward = loss.value(probe);
    probe[i] = x[i];
    fb.estimate[i] = (forward - backward) / (2.0 * h);
  }
  fb.error_bound = difference_bound(smoothness, p, h);
  fb.query_count = 2 * p;
  return fb;
}

bool is_zeroth_order(const OracleKind& kind) {
  return std::holds_alternative<ForwardDifferenceOracle>(kind) ||
         std::holds_alternative<SymmetricDifferenceOracle>(kind);
}

double max_discretization(const OracleKind& kind, int horizon) {
  if (const auto* fd = std::get_if<ForwardDifferenceOracle>(&kind)) return fd->h.max_over(horizon);
  if (const auto* sd = std::get_if<SymmetricDifferenceOracle>(&kind)) return sd->h.max_over(horizon);
  return 0.0;
}

Feedback query(const OracleKind& kind, const Loss& loss, const Vector& x, int round,
               const ConvexSet* domain, std::optional<double> smoothness) {
  struct Visitor {
    const Loss& loss;
    const Vector& x;
    int round;
    const ConvexSet* domain;
    std::optional<double> smoothness;

    Feedback operator()(const ExactOracle&) const { return exact_gradient(loss, x); }
    Feedback operator()(const NoisyOracle& o) const {
      return noisy_gradient(loss, x, o.delta.at(round), o.pattern, round);
    }
    Feedback operator()(const ForwardDifferenceOracle& o) const {
      return fd_estimate(loss, x, o.h.at(round), domain, smoothness);
    }
    Feedback operator()(const SymmetricDifferenceOracle& o) const {
      return sym_estimate(loss, x, o.h.at(round), domain, smoothness);
    }
  };
  Feedback fb = std::visit(Visitor{loss, x, round, domain, smoothness}, kind);
  fb.origin_round = round;
  return fb;
}

}  // namespace dogd
