#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dogd/analysis.hpp"
#include "support.hpp"

using namespace dogd;
using dogd::test::gaussian;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

BoundInputs random_inputs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 10.0), k(0.01, 1.0);
  std::uniform_int_distribution<int> d(1, 30), T(1, 100000), p(1, 200);
  BoundInputs in;
  in.R = u(rng);
  in.kappa = k(rng);
  in.L = u(rng);
  in.Gamma = u(rng);
  in.G = u(rng);
  in.d = d(rng);
  in.T = T(rng);
  in.eta = u(rng) * 1e-3;
  in.V = u(rng) * 10;
  in.Delta = u(rng);
  in.Lambda = u(rng);
  in.p = p(rng);
  in.h_sum = u(rng);
  in.h_sq_sum = u(rng) * 0.1;
  return in;
}

}  // namespace

TEST_CASE("dynamic regret") {
  const Vector x = Vector::Zero(2);
  SUBCASE("zero gaps") {
    RegretLedger l;
    for (int t = 0; t < 10; ++t) l.record(1.5 * t, 1.5 * t, x, 0.0, 1);
    CHECK(dynamic_regret(l) == 0.0);
  }
  SUBCASE("single round") {
    RegretLedger l;
    l.record(3.0, 0.5, x, 0.0, 1);
    CHECK(dynamic_regret(l) == 2.5);
    CHECK(l.cumulative_regret() == std::vector<double>{2.5});
  }
  SUBCASE("compensated matches naive") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RegretLedger l;
    double naive = 0.0;
    for (int t = 0; t < 20000; ++t) {
      const double f = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 6) - 3);
      l.record(f, 0.0, x, std::nullopt, 1);
      naive += f;
    }
    CHECK(rel(dynamic_regret(l), naive) <= 1e-10);
    CHECK(rel(l.cumulative_regret().back(), naive) <= 1e-10);
  }
  SUBCASE("missing minimum is refused") {
    RegretLedger l;
    l.record(1.0, std::numeric_limits<double>::quiet_NaN(), x, 0.0, 1);
    CHECK_THROWS_AS(dynamic_regret(l), std::invalid_argument);
  }
  SUBCASE("monotone for nonnegative gaps") {
    RegretLedger l;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) l.record(u(rng) + 1.0, 1.0, x, 0.0, 1);
    const auto c = l.cumulative_regret();
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] >= c[i - 1]);
  }
}

TEST_CASE("compensated summation") {
  CHECK(compensated_sum({1e16, 1.0, -1e16}) == 1.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(10000);
  double naive = 0.0;
  for (auto& x : v) {
    x = std::abs(n(rng));
    naive += x;
  }
  CHECK(rel(compensated_sum(v), naive) <= 1e-10);
}

TEST_CASE("path variation") {
  SUBCASE("constant") { CHECK(path_variation(std::vector<Vector>(5, Vector::Ones(3))) == 0.0); }
  SUBCASE("single point") { CHECK(path_variation({Vector::Ones(3)}) == 0.0); }
  SUBCASE("two points") {
    Vector a = Vector::Zero(2), b(2);
    b << 3.0, 0.0;
    CHECK(path_variation({a, b}) == 3.0);
  }
  SUBCASE("random walk and ledger agree with direct summation") {
    Rng rng(4);
    std::vector<Vector> path{Vector::Zero(5)};
    for (int t = 1; t < 1000; ++t) path.push_back(path.back() + 0.1 * gaussian(5, rng));
    double direct = 0.0;
    for (std::size_t t = 1; t < path.size(); ++t) direct += (path[t] - path[t - 1]).norm();
    CHECK(rel(path_variation(path), direct) <= 1e-12);
    RegretLedger l;
    for (const auto& x : path) l.record(0.0, 0.0, x, 0.0, 1);
    CHECK(rel(l.path_variation(), direct) <= 1e-12);
  }
}

TEST_CASE("cumulative errors") {
  CHECK(cumulative_errors({0.0, 0.0, 0.0}) == std::pair<double, double>{0.0, 0.0});
  CHECK(cumulative_errors({1.0, 2.0}) == std::pair<double, double>{3.0, 5.0});
  CHECK_THROWS_AS(cumulative_errors({-1.0}), std::invalid_argument);

  const int p = 4, T = 1000;
  const double G = 2.0;
  std::vector<double> h;
  double s1 = 0.0, s2 = 0.0;
  for (int t = 1; t <= T; ++t) {
    h.push_back(1.0 / t);
    s1 += 1.0 / t;
    s2 += 1.0 / (static_cast<double>(t) * t);
  }
  const auto [D, L] = bandit_error_sums(p, G, h);
  CHECK(rel(D, std::sqrt(p) * G / 2 * s1) <= 1e-14);
  CHECK(rel(L, p * G * G / 4 * s2) <= 1e-14);

  SUBCASE("ledger refuses uncertified rounds") {
    RegretLedger l;
    l.record(0.0, 0.0, Vector::Zero(1), 0.5, 1);
    l.record(0.0, 0.0, Vector::Zero(1), std::nullopt, 1);
    CHECK_FALSE(l.cumulative_errors().has_value());
  }
}

TEST_CASE("Lipschitz bound") {
  BoundInputs in;
  in.R = 1;
  in.eta = 1;
  in.kappa = 1;
  in.L = 1;
  in.d = 1;
  in.T = 1;
  CHECK(bound_lipschitz(in) == 2.5);

  std::mt19937_64 rng(5);
  SUBCASE("delay-free reduction") {
    for (int n = 0; n < 1000; ++n) {
      auto r = random_inputs(rng);
      r.d = 1;
      r.Delta = r.Lambda = 0.0;
      const double expected =
          2 * r.R * r.R / (r.eta * r.kappa) + 3 * r.R * r.V / (r.eta * r.kappa) + r.eta * r.L * r.L * r.T / (2 * r.kappa);
      CHECK(rel(bound_lipschitz(r), expected) <= 1e-12);
    }
  }
  SUBCASE("exact-gradient display agrees") {
    for (int n = 0; n < 1000; ++n) {
      auto r = random_inputs(rng);
      r.Delta = r.Lambda = 0.0;
      CHECK(rel(bound_lipschitz(r), bound_lipschitz_exact_gradient(r)) <= 1e-12);
    }
  }
  SUBCASE("increasing in d") {
    for (int n = 0; n < 100; ++n) {
      auto r = random_inputs(rng);
      const double b1 = bound_lipschitz(r);
      r.d *= 2;
      CHECK(bound_lipschitz(r) > b1);
    }
  }
  SUBCASE("nonpositive eta rejected") {
    in.eta = 0.0;
    CHECK_THROWS_AS(bound_lipschitz(in), std::invalid_argument);
    in.eta = -1.0;
    CHECK_THROWS_AS(bound_lipschitz(in), std::invalid_argument);
  }
}

TEST_CASE("weakly smooth bound") {
  CHECK(quadratic_bound(1, 0, 1) == 1.0);
  CHECK(quadratic_bound(1, 2, 0) == 4.0);
  CHECK_THROWS_AS(quadratic_bound(0, 1, 1), std::invalid_argument);

  std::mt19937_64 rng(6);
  SUBCASE("delay-free reduction") {
    for (int n = 0; n < 1000; ++n) {
      auto r = random_inputs(rng);
      r.d = 1;
      r.Delta = r.Lambda = 0.0;
      const double alpha = weakly_smooth_alpha_general(r.kappa, r.Gamma, 1);
      r.eta = 0.5 / alpha;
      const auto q = bound_weakly_smooth(r, alpha);
      const double expected = (2 * r.R * r.R + 3 * r.R * r.V) / ((1 - alpha * r.eta) * r.kappa);
      CHECK(q.b == 0.0);
      CHECK(rel(q.value, expected) <= 1e-12);
    }
  }
  SUBCASE("pre-simplification form") {
    for (int n = 0; n < 1000; ++n) {
      auto r = random_inputs(rng);
      const double alpha = weakly_smooth_alpha_general(r.kappa, r.Gamma, r.d);
      r.eta = 0.9 / alpha;
      const auto q = bound_weakly_smooth(r, alpha);
      const double root = (q.b + std::sqrt(q.b * q.b + 4 * q.a * q.c)) / (2 * q.a);
      CHECK(rel(q.value, root * root) <= 1e-12);
      CHECK(q.a == doctest::Approx(1 - alpha * r.eta).epsilon(1e-15));
    }
  }
  SUBCASE("threshold forms") {
    CHECK(weakly_smooth_alpha_general(1.0, 8.0, 1) == 4.0);
    CHECK(weakly_smooth_alpha_exact(1.0, 8.0, 1) == 4.0);
    CHECK(weakly_smooth_alpha_general(0.5, 2.0, 4) == doctest::Approx((4 + 4 * 2 * 3) * 2.0 / 1.0));
    CHECK(weakly_smooth_alpha_exact(0.5, 2.0, 4) == doctest::Approx((4 + 2 * 2 * 3) * 2.0 / 1.0));
    CHECK(bandit_alpha(0.5, 1.0, 4) == doctest::Approx((4 + 4 * 2 * 3) * 1.0 / 0.5));
  }
  SUBCASE("step size above threshold rejected") {
    auto r = random_inputs(rng);
    const double alpha = weakly_smooth_alpha_general(r.kappa, r.Gamma, r.d);
    r.eta = 1.0 / alpha;
    CHECK_THROWS_AS(bound_weakly_smooth(r, alpha), std::invalid_argument);
    r.eta = 2.0 / alpha;
    CHECK_THROWS_AS(bound_weakly_smooth(r, alpha), std::invalid_argument);
  }
}

TEST_CASE("bandit bound") {
  std::mt19937_64 rng(7);
  SUBCASE("zero discretization matches the weakly smooth bound at Gamma = 2G") {
    for (int n = 0; n < 200; ++n) {
      auto r = random_inputs(rng);
      r.h_sum = r.h_sq_sum = 0.0;
      const double a1 = bandit_alpha(r.kappa, r.G, r.d);
      r.eta = 0.7 / a1;
      auto w = r;
      w.Gamma = 2 * r.G;
      w.Delta = w.Lambda = 0.0;
      CHECK(rel(bound_bandit(r, a1).value, bound_weakly_smooth(w, a1).value) <= 1e-12);
    }
  }
  SUBCASE("delay-free, static reduction") {
    for (int n = 0; n < 200; ++n) {
      auto r = random_inputs(rng);
      r.d = 1;
      r.V = 0.0;
      r.h_sum = r.h_sq_sum = 0.0;
      const double a1 = bandit_alpha(r.kappa, r.G, 1);
      r.eta = 0.3 / a1;
      CHECK(rel(bound_bandit(r, a1).value, 2 * r.R * r.R / ((1 - a1 * r.eta) * r.kappa)) <= 1e-12);
    }
  }
  SUBCASE("monotone in h") {
    for (int n = 0; n < 200; ++n) {
      auto r = random_inputs(rng);
      const double a1 = bandit_alpha(r.kappa, r.G, r.d);
      r.eta = 0.5 / a1;
      const double b0 = bound_bandit(r, a1).value;
      r.h_sum *= 1.5;
      r.h_sq_sum *= 1.5 * 1.5;
      CHECK(bound_bandit(r, a1).value > b0);
    }
  }
  SUBCASE("threshold violation rejected") {
    auto r = random_inputs(rng);
    const double a1 = bandit_alpha(r.kappa, r.G, r.d);
    r.eta = 1.01 / a1;
    CHECK_THROWS_AS(bound_bandit(r, a1), std::invalid_argument);
  }
}

TEST_CASE("series helpers") {
  SUBCASE("average regret") { CHECK(average_regret({2.0, 3.0, 9.0}) == std::vector<double>{2.0, 1.5, 3.0}); }
  SUBCASE("trailing mean") {
    CHECK(trailing_mean({1, 2, 3, 4}, 2) == std::vector<double>{1.0, 1.5, 2.5, 3.5});
    CHECK(trailing_mean({4, 2}, 50) == std::vector<double>{4.0, 3.0});
    CHECK_THROWS_AS(trailing_mean({1.0}, 0), std::invalid_argument);
  }
  SUBCASE("threshold iteration") {
    CHECK(threshold_iteration({0.01, 5.0}, 0.1) == 1);
    std::vector<double> dec;
    for (int t = 1; t <= 100; ++t) dec.push_back(1.0 / t);
    CHECK(threshold_iteration(dec, 1.0 / 41.5) == 42);
    CHECK_FALSE(threshold_iteration({1.0, 0.5, 0.2}, 0.1).has_value());
    CHECK_FALSE(threshold_iteration({0.1}, 0.1).has_value());
    CHECK_THROWS_AS(threshold_iteration({1.0}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("double-sum interchange") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> ui(1, 1000);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  for (int T = 1; T <= 30; ++T) {
    for (int d = 1; d <= 6; ++d) {
      const auto [lc, rc] = delayed_double_sum_counts(T, d);
      CHECK(lc == rc);
      for (int n = 0; n < 10; ++n) {
        // Integer-valued terms keep every partial sum exact.
        std::vector<double> a(T);
        for (auto& v : a) v = ui(rng);
        const auto [lhs, rhs] = delayed_double_sum(a, d);
        CHECK(lhs == rhs);
        double total = 0.0;
        for (double v : a) total += v;
        CHECK(lhs <= (d - 1) * total);
        for (auto& v : a) v = ur(rng);
        const auto [l2, r2] = delayed_double_sum(a, d);
        CHECK(std::abs(l2 - r2) <= 1e-12 * std::max(1.0, l2));
      }
    }
  }
  SUBCASE("starting the inner sum at 2 drops terms") {
    const auto [lc, rc] = delayed_double_sum_counts(5, 3, 2);
    CHECK(lc != rc);
    const auto [l1, r1] = delayed_double_sum(std::vector<double>(5, 1.0), 3, 2);
    CHECK(r1 < l1);
  }
}
