#include <doctest.h>

#include <cmath>
#include <random>

#include "mtq/errors.hpp"
#include "mtq/rate.hpp"
#include "oracles.hpp"

using mtq::RateExpr;

TEST_CASE("eval_rate on the example rates") {
  const RateExpr lambda(1.0, {{1.0, 0.0, 1.0}});
  const RateExpr mu(3.0, {{0.0, 2.0, 1.0}});
  CHECK(mtq::eval_rate(lambda, 0.25) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mtq::eval_rate(mu, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  const RateExpr zero;
  CHECK(mtq::eval_rate(zero, 3.7) == 0.0);
  CHECK(zero.is_zero());
}

TEST_CASE("integrate_rate closed forms") {
  const RateExpr lambda(1.0, {{1.0, 0.0, 1.0}});
  const RateExpr mu(3.0, {{0.0, 2.0, 1.0}});
  CHECK(mtq::integrate_rate(lambda, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mtq::integrate_rate(mu, 0.0, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(mtq::integrate_rate(mu, 0.3, 0.3) == 0.0);
  CHECK_THROWS_AS(mtq::integrate_rate(mu, 1.0, 0.5), mtq::PreconditionError);
}

TEST_CASE("step terms") {
  const RateExpr r(1.0, {}, {{1.0, 2.0, 3.0}});
  CHECK(r(0.5) == 1.0);
  CHECK(r(1.0) == 4.0);
  CHECK(r(2.0) == 1.0);
  CHECK(r.integral(0.0, 3.0) == doctest::Approx(6.0));
  CHECK(r.integral(1.5, 2.5) == doctest::Approx(2.5));
  CHECK(r.has_steps());
  CHECK(r.last_breakpoint() == 2.0);
  CHECK_NOTHROW(RateExpr(1.0, {}, {{0.0, 1.0, -1.0}}));
  CHECK_THROWS_AS(RateExpr(1.0, {}, {{0.0, 1.0, -1.5}}), mtq::PreconditionError);
}

TEST_CASE("nonnegativity validation") {
  CHECK_THROWS_AS(RateExpr(-0.1), mtq::PreconditionError);
  CHECK_THROWS_AS(RateExpr(1.0, {{1.0, 0.5, 1.0}}), mtq::PreconditionError);
  // sin x + 0.3 sin 3x bottoms out near -0.92; only sampling can tell.
  CHECK_NOTHROW(RateExpr(1.2, {{1.0, 0.0, 1.0}, {0.3, 0.0, 3.0}}));
  CHECK_THROWS_AS(RateExpr(0.9, {{1.0, 0.0, 1.0}, {0.3, 0.0, 3.0}}), mtq::PreconditionError);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double a = amp(rng), b = amp(rng), c = amp(rng);
    const RateExpr r(std::abs(a) + std::abs(b) + std::abs(c), {{a, b, 1.0}, {c, 0.0, 2.0}});
    for (int i = 0; i <= 10000; ++i) REQUIRE(r(i / 10000.0) >= -1e-12);
  }
}

TEST_CASE("integral additivity and agreement with quadrature") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  const RateExpr r(2.0, {{0.7, -0.4, 1.0}, {0.3, 0.2, 2.5}}, {{0.5, 1.75, 0.4}});
  for (int rep = 0; rep < 100; ++rep) {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const double whole = r.integral(a, c);
    CHECK(r.integral(a, b) + r.integral(b, c) ==
          doctest::Approx(whole).epsilon(1e-12).scale(1.0));
    // Simpson on the pieces between step edges.
    double ref = 0.0;
    std::vector<double> cuts{a};
    for (double e : {0.5, 1.75}) {
      if (e > a && e < c) cuts.push_back(e);
    }
    cuts.push_back(c);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double lo = cuts[i], hi = cuts[i + 1];
      const double level = (lo >= 0.5 && hi <= 1.75) ? 0.4 : 0.0;
      ref += oracle::simpson(
          [&](double t) {
            return 2.0 + 0.7 * std::sin(2 * oracle::kPi * t) - 0.4 * std::cos(2 * oracle::kPi * t) +
                   0.3 * std::sin(5 * oracle::kPi * t) + 0.2 * std::cos(5 * oracle::kPi * t) + level;
          },
          lo, hi, 2000);
    }
    CHECK(whole == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("combination may go negative") {
  const RateExpr lambda(1.0, {{1.0, 0.0, 1.0}});
  const RateExpr mu(3.0, {{0.0, 2.0, 1.0}});
  const RateExpr xi(1.0, {{-1.0, 0.0, 1.0}});
  const double w[] = {-1.0, 1.0, 1.0};
  const RateExpr* terms[] = {&lambda, &mu, &xi};
  const RateExpr lower = RateExpr::combination(w, terms);
  for (double t : {0.0, 0.1, 0.37, 0.8}) {
    CHECK(lower(t) == doctest::Approx(3.0 + 2.0 * std::cos(2 * oracle::kPi * t) -
                                      2.0 * std::sin(2 * oracle::kPi * t)));
  }
  CHECK(lower.trig_terms().size() == 1);
  CHECK(lower.integral(0.0, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("grid bounds and lipschitz constant") {
  const RateExpr r(3.0, {{0.0, 2.0, 1.0}});
  CHECK(r.lipschitz() == doctest::Approx(4.0 * oracle::kPi));
  CHECK(r.sup_bound(0.0, 1.0, 1e-4) >= 5.0);
  CHECK(r.sup_bound(0.0, 1.0, 1e-4) <= 5.0 + 1e-3);
  CHECK(r.inf_bound(0.0, 1.0, 1e-4) <= 1.0);
}

TEST_CASE("common period") {
  const RateExpr a(2.0, {{1.0, 0.0, 1.0}});
  const RateExpr b(2.0, {{1.0, 0.0, 1.5}});
  const RateExpr c(2.0, {{1.0, 0.0, std::sqrt(2.0)}});
  const RateExpr s(2.0, {}, {{0.0, 1.0, 1.0}});
  const RateExpr k(2.0);
  {
    const RateExpr* e[] = {&a, &b};
    REQUIRE(mtq::common_period(e).has_value());
    CHECK(*mtq::common_period(e) == doctest::Approx(2.0));
  }
  {
    const RateExpr* e[] = {&a, &c};
    CHECK_FALSE(mtq::common_period(e).has_value());
  }
  {
    const RateExpr* e[] = {&a, &s};
    CHECK_FALSE(mtq::common_period(e).has_value());
  }
  {
    const RateExpr* e[] = {&k};
    CHECK(*mtq::common_period(e) == 1.0);
  }
}
