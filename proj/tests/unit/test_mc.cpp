#include <doctest.h>

#include <cmath>

#include "mtq/errors.hpp"
#include "mtq/example.hpp"
#include "mtq/kfe.hpp"
#include "mtq/mc.hpp"

using namespace mtq;

TEST_CASE("pure death") {
  const QueueModel m(1, RateExpr(0.0), RateExpr(1.0), RateExpr(0.0), CatastropheProfile());
  const auto est = simulate_estimate(m, 1, {1.0}, 20000, 7);
  const auto p0 = est.probability_estimate(0, 0);
  CHECK(std::abs(p0.value - (1.0 - std::exp(-1.0))) <= 4.0 * p0.se);
  CHECK(p0.se == doctest::Approx(std::sqrt(0.632 * 0.368 / 20000)).epsilon(0.02));
  CHECK(est.probability(0, 1) + p0.value == doctest::Approx(1.0));
  CHECK(est.probability(0, 5) == 0.0);
}

TEST_CASE("no events") {
  const QueueModel m(1, RateExpr(0.0), RateExpr(0.0), RateExpr(0.0), CatastropheProfile());
  const auto est = simulate_estimate(m, 4, {0.0, 1.0, 10.0}, 100, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(est.probability(i, 4) == 1.0);
    CHECK(est.probability_estimate(i, 4).se == 0.0);
    CHECK(est.mean[i].value == 4.0);
    CHECK(est.mean[i].se == 0.0);
  }
  CHECK(est.candidate_events == 0);
}

TEST_CASE("reproducible streams") {
  const QueueModel m = example_model();
  const auto a = simulate_estimate(m, 0, {0.5, 1.0}, 500, 42);
  const auto b = simulate_estimate(m, 0, {0.5, 1.0}, 500, 42);
  const auto c = simulate_estimate(m, 0, {0.5, 1.0}, 500, 43);
  CHECK(a.mean[1].value == b.mean[1].value);
  CHECK(a.candidate_events == b.candidate_events);
  CHECK(a.accepted_events == b.accepted_events);
  CHECK(a.state_probs[1].size() == b.state_probs[1].size());
  CHECK(a.candidate_events != c.candidate_events);
  CHECK(a.accepted_events <= a.candidate_events);
}

TEST_CASE("standard error shrinks like 1/sqrt(paths)") {
  const QueueModel m = example_model();
  const auto small = simulate_estimate(m, 0, {1.0}, 2000, 3);
  const auto large = simulate_estimate(m, 0, {1.0}, 8000, 3);
  CHECK(large.mean[0].se / small.mean[0].se == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("simulation agrees with the forward equations") {
  const std::size_t n = 60;
  const QueueModel models[] = {
      QueueModel(2, RateExpr(1.5), RateExpr(1.0), RateExpr(0.3), CatastropheProfile::one_plus_c_over_k(1.0)),
      example_model(),
  };
  for (const auto& m : models) {
    const std::vector<double> times{0.5, 1.0, 2.0};
    const auto est = simulate_estimate(m, 2, times, 20000, 11);
    ForwardSolver solver(m, n, ProbabilityVector::point_mass(n, 2), 0.0, 1e-4);
    for (std::size_t i = 0; i < times.size(); ++i) {
      solver.advance_to(times[i]);
      const auto p = solver.state();
      CHECK(std::abs(est.mean[i].value - p.mean()) <= 4.0 * est.mean[i].se);
      for (State k : {0, 1, 2, 3}) {
        const auto e = est.probability_estimate(i, k);
        CHECK(std::abs(e.value - p[k]) <= 4.0 * std::max(e.se, 1e-3));
      }
    }
  }
}

TEST_CASE("simulation preconditions") {
  const QueueModel m = example_model();
  CHECK_THROWS_AS(simulate_estimate(m, 0, {}, 10, 1), PreconditionError);
  CHECK_THROWS_AS(simulate_estimate(m, 0, {1.0}, 0, 1), PreconditionError);
  CHECK_THROWS_AS(simulate_estimate(m, 0, {1.0, 0.5}, 10, 1), PreconditionError);
  CHECK_THROWS_AS(simulate_estimate(m, 0, {-1.0}, 10, 1), PreconditionError);
}
