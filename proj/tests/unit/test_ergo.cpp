#include <doctest.h>

#include <cmath>
#include <random>

#include "mtq/errors.hpp"
#include "mtq/ergo.hpp"
#include "mtq/example.hpp"
#include "oracles.hpp"

using namespace mtq;

namespace {

const double kSqrt2 = std::sqrt(2.0);

QueueModel constant_model(double lam, double mu, double xi, std::uint64_t s = 1,
                          CatastropheProfile zeta = CatastropheProfile::constant(1.0)) {
  return QueueModel(s, RateExpr(lam), RateExpr(mu), RateExpr(xi), zeta);
}

// alpha_k for the worked example with doubling weights, no weight overflow:
// d_{k+1}/d_k is 1 at k = 0 and 2 afterwards.
double example_alpha(std::uint64_t k, double t) {
  const double up = k == 0 ? 1.0 : 2.0;
  const double down = k == 0 ? 0.0 : (k == 1 ? 1.0 : 0.5);
  const double busy_next = static_cast<double>(k + 1);  // S = 1e12 never binds here
  return oracle::lambda4(t) + busy_next * oracle::mu4(t) + oracle::zeta4(k + 1) * oracle::xi4(t) -
         up * oracle::lambda4(t) - down * static_cast<double>(k) * oracle::mu4(t);
}

}  // namespace

TEST_CASE("alpha_k examples") {
  const QueueModel m = example_model();
  const auto w = WeightSequence::doubling();
  CHECK(alpha_k(m, w, 0, 0.0) == doctest::Approx(7.0));
  CHECK(alpha_k(m, w, 1, 0.0) == doctest::Approx(5.5));
  const QueueModel zero = constant_model(0, 0, 0, 3);
  for (std::uint64_t k : {0, 1, 2, 5, 100}) CHECK(alpha_k(zero, w, k, 0.7) == 0.0);
}

TEST_CASE("alpha_k agrees with a re-implementation through transition_rates") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_int_distribution<std::uint64_t> kd(0, 900);
  const QueueModel small_s(40, RateExpr(1.0, {{1.0, 0.0, 1.0}}), RateExpr(3.0, {{0.0, 2.0, 1.0}}),
                           RateExpr(1.0, {{-1.0, 0.0, 1.0}}),
                           CatastropheProfile::table_with_tail({3.0, 0.5, 2.0}, 1.25));
  const auto custom = WeightSequence::custom({1.0, 1.5, 1.5, 4.0}, 1.5);
  const std::vector<double> custom_head{1.0, 1.0, 1.5, 1.5, 4.0};
  auto custom_d = [&](std::uint64_t i) {
    return i < custom_head.size() ? custom_head[i] : 4.0 * std::pow(1.5, static_cast<double>(i - 4));
  };
  const auto doubling = WeightSequence::doubling();
  for (int rep = 0; rep < 1000; ++rep) {
    const std::uint64_t k = kd(rng);
    const double t = u(rng);
    for (const QueueModel* m : {&small_s}) {
      const double ref_d = oracle::alpha_k(*m, oracle::doubling_d, k, t);
      CHECK(alpha_k(*m, doubling, k, t) ==
            doctest::Approx(ref_d).epsilon(1e-12).scale(std::abs(ref_d) > 1 ? 0.0 : 1.0));
      if (k < 600) {
        const double ref_c = oracle::alpha_k(*m, custom_d, k, t);
        CHECK(alpha_k(*m, custom, k, t) == doctest::Approx(ref_c).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("alpha_inf") {
  const QueueModel m = example_model();
  const auto w = WeightSequence::doubling();
  CHECK(alpha_inf(m, w, 0.0, 1000) == doctest::Approx(5.5));

  double brute = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k <= 1000000; ++k) brute = std::min(brute, example_alpha(k, 0.0));
  CHECK(brute == doctest::Approx(5.5));

  const auto alpha = alpha_decay(m, w);
  CHECK(alpha.term(alpha.argmin(0.0)).state == 1);
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const double lower = 3.0 + 2.0 * std::cos(2 * oracle::kPi * t) - 2.0 * std::sin(2 * oracle::kPi * t);
    REQUIRE(alpha(t) >= lower - 1e-12);
    double ref = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k <= 200; ++k) ref = std::min(ref, example_alpha(k, t));
    REQUIRE(alpha(t) == doctest::Approx(ref).epsilon(1e-12));
  }

  const QueueModel clear_only = constant_model(0, 0, 2.5);
  CHECK(alpha_inf(clear_only, WeightSequence::powers(1.7), 0.3) == doctest::Approx(2.5));
  CHECK(alpha_inf(clear_only, w, 0.3) == doctest::Approx(2.5));
}

TEST_CASE("alpha tail term bounds every k beyond k_eval") {
  const QueueModel m(30, RateExpr(1.0, {{1.0, 0.0, 1.0}}), RateExpr(0.2), RateExpr(0.5),
                     CatastropheProfile::one_plus_c_over_k(-0.5));
  const auto w = WeightSequence::powers(1.3);
  const auto alpha = alpha_decay(m, w, 10);
  for (double t : {0.0, 0.25, 0.6}) {
    double ref = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k <= 5000; ++k) ref = std::min(ref, alpha_k(m, w, k, t));
    CHECK(alpha(t) <= ref + 1e-12);
    CHECK(alpha(t) >= ref - 1e-3);  // the tail uses inf zeta, approached as k grows
  }
}

TEST_CASE("alpha_integral") {
  const QueueModel m = example_model();
  const auto w = WeightSequence::doubling();
  const auto alpha = alpha_decay(m, w);
  const double one = alpha.integral(0.0, 1.0);
  CHECK(one >= 3.0);
  CHECK(alpha_integral(m, w, 0.0, 1.0) == doctest::Approx(one));
  CHECK(alpha_integral(m, w, 0.4, 0.4) == 0.0);
  CHECK_THROWS_AS(alpha_integral(m, w, 1.0, 0.5), PreconditionError);

  // Simpson on min over the first 200 alpha_k, in test code only.
  const double ref = oracle::simpson(
      [](double t) {
        double v = std::numeric_limits<double>::infinity();
        for (std::uint64_t k = 0; k <= 200; ++k) v = std::min(v, example_alpha(k, t));
        return v;
      },
      0.0, 1.0, 200000);
  CHECK(one == doctest::Approx(ref).epsilon(1e-8));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int rep = 0; rep < 20; ++rep) {
    double s = u(rng), t = u(rng);
    if (s > t) std::swap(s, t);
    const double closed = alpha.integral(s, t);
    CHECK(closed == doctest::Approx(alpha.integral_quadrature(s, t)).epsilon(1e-9).scale(1.0));
    CHECK(closed == doctest::Approx(alpha.integral(s, t, 1000)).epsilon(1e-11).scale(1.0));
  }

  const auto flat = linear_decay(m, 0.0, 0.0, 0.0, "zero");
  const auto c = alpha_decay(constant_model(0, 0, 1.75), w);
  CHECK(c.integral(0.0, 2.0) == doctest::Approx(3.5));
  CHECK(flat.integral(0.0, 5.0) == 0.0);
}

TEST_CASE("weak ergodicity verdicts") {
  const auto w = WeightSequence::doubling();
  const auto yes = check_weak_ergodicity(example_model(), w);
  CHECK(yes.outcome == ErgodicityVerdict::Outcome::yes);
  CHECK(yes.period_mean >= 3.0);
  CHECK_FALSE(yes.trace.empty());

  const auto no = check_weak_ergodicity(constant_model(2, 0, 0), WeightSequence::powers(2.0));
  CHECK(no.outcome == ErgodicityVerdict::Outcome::no);
  CHECK(no.period_mean == doctest::Approx(-2.0));

  const auto zero = check_weak_ergodicity(constant_model(0, 0, 0), w);
  CHECK(zero.outcome == ErgodicityVerdict::Outcome::no);
  CHECK(zero.period_mean == 0.0);

  const QueueModel aperiodic(1, RateExpr(1.0, {{0.5, 0.0, 1.0}, {0.3, 0.0, std::sqrt(2.0)}}),
                             RateExpr(2.0), RateExpr(1.0), CatastropheProfile());
  CHECK(check_weak_ergodicity(aperiodic, w).outcome == ErgodicityVerdict::Outcome::undetermined);
}

TEST_CASE("fit_envelope") {
  const QueueModel m = example_model();
  SUBCASE("lower bound of the example") {
    const auto lower = example_lower_decay(m);
    const auto env = fit_envelope(lower, 1.0);
    CHECK(env.a == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(env.M == doctest::Approx(std::exp(2 * kSqrt2 / oracle::kPi)).epsilon(1e-10));
    CHECK(env.M <= 4.0);
    CHECK(verify_envelope(lower, env, 1.0).ok);
    const auto env2 = fit_envelope(lower, 2.0);
    CHECK(env2.M == doctest::Approx(env.M).epsilon(1e-10));
  }
  SUBCASE("constant alpha") {
    const auto flat = linear_decay(constant_model(0, 0, 1.3), 0.0, 0.0, 1.0, "xi");
    const auto env = fit_envelope(flat, 1.0);
    CHECK(env.a == doctest::Approx(1.3));
    CHECK(env.M == 1.0);
  }
  SUBCASE("1 + sin") {
    const QueueModel q(1, RateExpr(1.0, {{1.0, 0.0, 1.0}}), RateExpr(0.0), RateExpr(0.0),
                       CatastropheProfile());
    const auto a = linear_decay(q, 1.0, 0.0, 0.0, "lambda");
    const auto env = fit_envelope(a, 1.0);
    CHECK(env.a == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(env.M == doctest::Approx(std::exp(1.0 / oracle::kPi)).epsilon(1e-10));
    CHECK(verify_envelope(a, env, 1.0).ok);
    Envelope tight = env;
    tight.M = 1.2;
    tight.log_M = std::log(1.2);
    CHECK_FALSE(verify_envelope(a, tight, 1.0).ok);
  }
  SUBCASE("full alpha and uniform minimum") {
    const auto alpha = alpha_decay(m, WeightSequence::doubling());
    const auto env = fit_envelope(alpha, 1.0);
    CHECK(env.a == doctest::Approx(alpha.period_mean()));
    CHECK(verify_envelope(alpha, env, 1.0).ok);
    const auto uni = fit_envelope(alpha, 1.0, EnvelopeStrategy::uniform_minimum);
    CHECK(uni.M == 1.0);
    CHECK(uni.a <= env.a);
    CHECK(verify_envelope(alpha, uni, 1.0).ok);
  }
  SUBCASE("no envelope") {
    const auto neg = linear_decay(constant_model(2, 0, 0), -1.0, 0.0, 0.0, "-lambda");
    CHECK_THROWS_AS(fit_envelope(neg, 1.0), PreconditionError);
    const auto lower = example_lower_decay(m);
    CHECK_THROWS_AS(fit_envelope(lower, 0.5), PreconditionError);
    const QueueModel q(1, RateExpr(1.0, {{1.0, 0.0, 1.0}}), RateExpr(0.0), RateExpr(0.0),
                       CatastropheProfile());
    const auto touches_zero = linear_decay(q, 1.0, 0.0, 0.0, "lambda");
    CHECK_THROWS_AS(fit_envelope(touches_zero, 1.0, EnvelopeStrategy::uniform_minimum),
                    PreconditionError);
  }
}

TEST_CASE("tv_distance_bound") {
  const QueueModel m = example_model();
  const auto w = WeightSequence::doubling();
  const auto alpha = alpha_decay(m, w);
  const auto e5 = ProbabilityVector::point_mass(10, 5);
  const auto e0 = ProbabilityVector::point_mass(10, 0);
  for (double t : {0.0, 0.5, 1.0, 3.0, 7.0}) {
    const double b = tv_distance_bound(alpha, w, 0.0, t, e5, e0);
    CHECK(b == doctest::Approx(4.0 * 31.0 * std::exp(-alpha.integral(0.0, t))));
    CHECK(b <= 128.0 * std::exp(-alpha.integral(0.0, t)));
    CHECK(b <= 512.0 * std::exp(-3.0 * t));
  }
  CHECK(tv_distance_bound(alpha, w, 0.0, 2.0, e5, e5) == 0.0);
  const ProbabilityVector mix({0.25, 0.25, 0.5});
  CHECK(tv_distance_bound(alpha, w, 1.0, 1.0, mix, e0) ==
        doctest::Approx(4.0 * (1.0 * 0.25 + 3.0 * 0.5)));
  CHECK(tv_distance_bound(m, w, 0.0, 1.0, e5, e0) > tv_distance_bound(m, w, 0.0, 2.0, e5, e0));
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), PreconditionError);
}

TEST_CASE("limiting_mean_bound") {
  const QueueModel m = example_model();
  const auto w = WeightSequence::doubling();
  CHECK(limiting_mean_bound(m, w, 1.0, 0) == 0.0);
  // 4 g_3 / W with g_3 = d_1 + d_2 + d_3 = 1 + 2 + 4.
  CHECK(limiting_mean_bound(m, w, 0.0, 3) == doctest::Approx(28.0));
  CHECK(limiting_mean_bound(m, w, 0.0, 3) <= 32.0);
  const auto lower = example_lower_decay(m);
  for (double t : {0.5, 2.0, 6.0}) {
    for (State k : {1, 4, 9}) {
      const double b = limiting_mean_bound(m, w, t, k);
      CHECK(b <= std::ldexp(std::exp(-lower.integral(0.0, t)), static_cast<int>(k) + 2) * (1 + 1e-12));
      CHECK(b <= std::ldexp(std::exp(-3.0 * t), static_cast<int>(k) + 4));
    }
  }
  CHECK_THROWS_AS(limiting_mean_bound(m, WeightSequence::custom({1.0}, 1.0), 1.0, 2),
                  NumericalError);
}

TEST_CASE("regime bounds") {
  const QueueModel m = example_model();
  for (double t : {0.0, 0.7, 3.0}) {
    const auto b = regime_bounds(m, Regime::catastrophe, 0.5, t, 0);
    const double exponent = oracle::simpson(
        [](double u) { return oracle::xi4(u) - 0.5 * oracle::lambda4(u); }, 0.0, t, 2000);
    CHECK(b.tv_bound == doctest::Approx(8.0 * std::exp(-exponent)).epsilon(1e-10));
    CHECK(b.mean_bound == doctest::Approx(b.tv_bound / b.W));
  }
  for (Regime mode : {Regime::catastrophe, Regime::service}) {
    const auto b = regime_bounds(m, mode, 0.25, 0.0, 0);
    CHECK(b.tv_bound == doctest::Approx(16.0));
  }
  const auto k3 = regime_bounds(m, Regime::catastrophe, 0.5, 0.0, 3);
  CHECK(k3.tv_bound == doctest::Approx(4.0 * 1.5 * 1.5 * 1.5 / 0.5));

  const QueueModel balanced(4, RateExpr(8.0), RateExpr(2.0), RateExpr(1.0), CatastropheProfile());
  CHECK_THROWS_AS(regime_bounds(balanced, Regime::service, 0.1, 1.0, 0), PreconditionError);
  const QueueModel no_clear(4, RateExpr(1.0), RateExpr(2.0), RateExpr(1.0),
                            CatastropheProfile::constant(0.0));
  CHECK_THROWS_AS(regime_bounds(no_clear, Regime::catastrophe, 0.1, 1.0, 0), PreconditionError);
  CHECK_THROWS_AS(regime_bounds(m, Regime::catastrophe, 0.0, 1.0, 0), PreconditionError);
  CHECK(parse_regime("service") == Regime::service);
  CHECK_THROWS_AS(parse_regime("other"), PreconditionError);

  const auto single = regime_bounds(constant_model(1, 3, 0), Regime::service, 0.5, 1.0, 0);
  CHECK(single.note.empty());
  CHECK_FALSE(regime_bounds(m, Regime::service, 0.5, 1.0, 0).note.empty());
}

TEST_CASE("which certificate is sharper on the worked example") {
  const QueueModel m = example_model();
  const auto w = WeightSequence::doubling();
  const auto alpha = alpha_decay(m, w);
  for (double t : {1.0, 2.0, 5.0}) {
    for (State k : {0, 1, 5}) {
      const auto e_k = ProbabilityVector::point_mass(10, k);
      const auto e_0 = ProbabilityVector::point_mass(10, 0);
      const double weighted = k == 0 ? 4.0 * std::exp(-alpha.integral(0.0, t))
                                     : tv_distance_bound(alpha, w, 0.0, t, e_k, e_0);
      // With S = 1e12 the service-regime rate eps/(1+eps) S mu dwarfs alpha.
      const auto service = sweep_epsilon(m, Regime::service, t, k);
      CHECK(service.bound.tv_bound < weighted);
      // The catastrophe regime only has zeta xi - eps lambda to work with.
      const auto clear = sweep_epsilon(m, Regime::catastrophe, t, k);
      CHECK(weighted <= clear.bound.tv_bound);
    }
  }
}

TEST_CASE("sweep_epsilon") {
  const QueueModel m = example_model();
  const auto best = sweep_epsilon(m, Regime::catastrophe, 4.0, 2, 64);
  CHECK(best.feasible > 0);
  CHECK(best.feasible < 64);  // eps >= 1 makes xi - eps lambda have mean <= 0
  for (double eps : {0.01, 0.1, 0.3, 0.9}) {
    CHECK(best.bound.tv_bound <= regime_bounds(m, Regime::catastrophe, eps, 4.0, 2).tv_bound * 1.05);
  }
  const QueueModel balanced(4, RateExpr(8.0), RateExpr(2.0), RateExpr(1.0), CatastropheProfile());
  CHECK_THROWS_AS(sweep_epsilon(balanced, Regime::service, 1.0, 0), PreconditionError);
}

TEST_CASE("log-norm of D B D^-1") {
  const auto w = WeightSequence::doubling();
  SUBCASE("constant zeta: interior columns equal -alpha") {
    const QueueModel m(1000000, RateExpr(1.0, {{1.0, 0.0, 1.0}}), RateExpr(3.0, {{0.0, 2.0, 1.0}}),
                       RateExpr(1.0, {{-1.0, 0.0, 1.0}}), CatastropheProfile::constant(1.5));
    for (double t : {0.0, 0.25, 0.5, 0.75}) {
      const auto o = lognorm_oracle(m, w, 30, t);
      for (std::size_t j = 3; j <= 29; ++j) {
        CHECK(o.per_column[j - 1] == doctest::Approx(-alpha_k(m, w, j - 1, t)).epsilon(1e-9));
      }
    }
  }
  SUBCASE("state-dependent zeta: closed form of the column sums") {
    const QueueModel m = example_model();
    for (double t : {0.0, 0.25, 0.5, 0.75}) {
      const auto o = lognorm_oracle(m, w, 30, t);
      const double lam = oracle::lambda4(t);
      for (std::size_t j = 3; j <= 29; ++j) {
        const double dj = oracle::doubling_d(j);
        const double mu_prev = (j - 1) * oracle::mu4(t);
        const double xi_prev = oracle::zeta4(j - 1) * oracle::xi4(t);
        const double xi_j = oracle::zeta4(j) * oracle::xi4(t);
        double ref = -(lam + j * oracle::mu4(t) + xi_j) + oracle::doubling_d(j + 1) / dj * lam +
                     oracle::doubling_d(j - 1) / dj * std::abs(mu_prev + xi_prev - xi_j);
        for (std::size_t i = 1; i + 1 < j; ++i) {
          ref += oracle::doubling_d(i) / dj * std::abs(xi_prev - xi_j);
        }
        CHECK(o.per_column[j - 1] == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }
  SUBCASE("catastrophes only") {
    const QueueModel m(3, RateExpr(0.0), RateExpr(0.0), RateExpr(2.0, {{0.5, 0.0, 1.0}}),
                       CatastropheProfile::constant(1.0));
    for (double t : {0.0, 0.3}) {
      const auto o = lognorm_oracle(m, w, 12, t);
      CHECK(o.gamma == doctest::Approx(-(2.0 + 0.5 * std::sin(2 * oracle::kPi * t))));
    }
  }
  CHECK_THROWS_AS(lognorm_oracle(example_model(), w, 3, 0.0), PreconditionError);
}

TEST_CASE("bound_report") {
  const QueueModel m = example_model();
  const auto report = bound_report(m, WeightSequence::doubling(), {0.0, 1.0, 2.0, 4.0}, {0, 1, 5});
  CHECK(report.W == 1.0);
  REQUIRE(report.envelope.has_value());
  CHECK(report.rows.size() == 12);
  for (const auto& r : report.rows) {
    CHECK(r.tv_bound >= 0.0);
    REQUIRE(r.mean_bound.has_value());
    CHECK(*r.mean_bound >= 0.0);
  }
  // rows are (t, k) in t-major order
  for (std::size_t i = 3; i < report.rows.size(); ++i) {
    CHECK(report.rows[i].tv_bound <= report.rows[i - 3].tv_bound);
  }
}
