#include "mtq/example.hpp"

#include <algorithm>
#include <cmath>

namespace mtq {

QueueModel example_model() {
  return QueueModel(1000000000000ULL, RateExpr(1.0, {{1.0, 0.0, 1.0}}),
                    RateExpr(3.0, {{0.0, 2.0, 1.0}}), RateExpr(1.0, {{-1.0, 0.0, 1.0}}),
                    CatastropheProfile::one_plus_c_over_k(1.0));
}

DecayFunction example_lower_decay(const QueueModel& model) {
  return linear_decay(model, -1.0, 1.0, 1.0, "mu + xi - lambda");
}

ExampleConstants example_constants(const QueueModel& model, std::uint64_t n) {
  const WeightSequence w = WeightSequence::doubling();
  ExampleConstants c;
  c.W = w.W();
  c.n = n;
  c.log_W_n = w.log_W_n(n);
  c.W_n = std::exp(c.log_W_n);
  c.L = essential_bound(model);
  const DecayFunction lower = example_lower_decay(model);
  const double period = model.period().value_or(1.0);
  c.envelope = fit_envelope(lower, period);
  c.envelope_check = verify_envelope(lower, c.envelope, period);
  const DecayFunction alpha = alpha_decay(model, w);
  c.verdict = check_weak_ergodicity(alpha);
  c.alpha_envelope = fit_envelope(alpha, period);
  return c;
}

ExampleRun run_example(const ExampleOptions& options) {
  const QueueModel model = example_model();
  const WeightSequence w = WeightSequence::doubling();
  ExampleRun run;
  run.options = options;
  run.constants = example_constants(model, options.n);
  const double L = run.constants.L.value;
  const Envelope& env = run.constants.envelope;

  run.certificate = truncation_bounds(L, w, env, options.n, options.horizon, 0);
  run.certified = run.certificate.tv_bound <= options.target &&
                  run.certificate.mean_bound <= options.target;
  run.min_level = min_truncation_level(L, w, env, options.horizon, 0, options.target,
                                       Criterion::both);

  std::vector<std::uint64_t> levels{100, 110, run.min_level.n, options.n, 130, 150};
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (std::uint64_t n : levels) {
    run.truncation_table.push_back({n, truncation_bounds(L, w, env, n, options.horizon, 0),
                                    rounded_tv_form(n, options.horizon, 0),
                                    rounded_mean_form(n, options.horizon, 0)});
  }

  run.limit = limiting_regime(model, options.n, options.settle, model.period().value_or(1.0),
                              options.tol, options.h, options.samples);

  const State k = options.contrast_state;
  const DecayFunction alpha = alpha_decay(model, w);
  const DecayFunction lower = example_lower_decay(model);
  ForwardSolver from_k(model, options.n, ProbabilityVector::point_mass(options.n, k), 0.0,
                       options.h);
  ForwardSolver from_0(model, options.n, ProbabilityVector::point_mass(options.n, 0), 0.0,
                       options.h);
  const auto last = static_cast<int>(std::floor(options.horizon));
  for (int i = 0; i <= last; ++i) {
    const double t = i;
    from_k.advance_to(t);
    from_0.advance_to(t);
    ContractionRow row;
    row.t = t;
    row.l1 = l1_distance(from_k.probs(), from_0.probs());
    row.mean_gap = std::abs(from_k.state().mean() - from_0.state().mean());
    row.tv_bound = 4.0 * w.g(k) * std::exp(-alpha.integral(0.0, t));
    row.lower_form = std::ldexp(std::exp(-lower.integral(0.0, t)), static_cast<int>(k) + 2);
    row.simple_form = std::ldexp(std::exp(-3.0 * t), static_cast<int>(k) + 4);
    run.contraction.push_back(row);
  }
  return run;
}

}  // namespace mtq
