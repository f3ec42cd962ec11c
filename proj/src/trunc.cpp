#include "mtq/trunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mtq/errors.hpp"

namespace mtq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

}  // namespace

TruncationReport truncation_bounds(double L, const WeightSequence& w, const Envelope& env,
                                   std::uint64_t n, double t, State j) {
  if (n < 1) throw PreconditionError("truncation level n must be >= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("horizon t must be finite and >= 0");
  if (!(L > 0.0) || !std::isfinite(L)) throw PreconditionError("essential bound L must be positive");
  if (!(env.a > 0.0) || !(env.M >= 1.0)) {
    throw PreconditionError("envelope needs a > 0 and M >= 1");
  }
  TruncationReport r;
  r.n = n;
  r.t = t;
  r.j = j;
  r.L = L;
  r.M = env.M;
  r.log_M = env.log_M > 0.0 ? env.log_M : std::log(env.M);
  r.a = env.a;
  r.log_W_n = w.log_W_n(n);
  r.W_n = std::exp(r.log_W_n);
  r.d1 = w.d(1);
  r.d_j1 = w.d(j + 1);
  r.weights = w.describe();

  const double log_L = std::log(L);
  const double log_M = r.log_M;
  double log_paren = log_L + log_M + w.log_d(1) - std::log(env.a);
  if (j > 0) {
    log_paren = log_add(log_paren, log_M + std::log(static_cast<double>(j)) + w.log_d(j + 1));
  }
  const double log_t = t > 0.0 ? std::log(t) : kNegInf;
  const double log_n = std::log(static_cast<double>(n));
  const double common = log_L + log_t - log_n - r.log_W_n + log_paren;
  r.log_tv_bound = std::log(8.0) + common;
  r.log_mean_bound = std::log(3.0) + std::log(static_cast<double>(n) + 1.0) + common;
  r.tv_bound = std::exp(r.log_tv_bound);
  r.mean_bound = std::exp(r.log_mean_bound);
  return r;
}

TruncationReport truncation_bounds(const QueueModel& model, const WeightSequence& w,
                                   const Envelope& env, std::uint64_t n, double t, State j) {
  return truncation_bounds(essential_bound(model).value, w, env, n, t, j);
}

TruncationReport regime_truncation_bounds(const QueueModel& model, Regime mode, double eps,
                                  std::uint64_t n, double t, State j) {
  check_regime(model, mode, eps);
  const DecayFunction rate = regime_decay(model, mode, eps);
  const WeightSequence w = WeightSequence::powers(1.0 + eps);
  const double L = essential_bound(model).value;
  const double period = *rate.period();

  std::optional<TruncationReport> best;
  for (EnvelopeStrategy strategy :
       {EnvelopeStrategy::period_mean, EnvelopeStrategy::uniform_minimum}) {
    Envelope env;
    try {
      env = fit_envelope(rate, period, strategy);
    } catch (const PreconditionError&) {
      continue;
    }
    if (!std::isfinite(env.log_M)) continue;
    TruncationReport r = truncation_bounds(L, w, env, n, t, j);
    if (!best || r.log_tv_bound < best->log_tv_bound) best = r;
  }
  if (!best) {
    throw PreconditionError("no exponential envelope for the " + to_string(mode) +
                            " regime decay rate");
  }
  return *best;
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::tv:
      return "tv";
    case Criterion::mean:
      return "mean";
    case Criterion::both:
      return "both";
  }
  return "both";
}

Criterion parse_criterion(const std::string& name) {
  if (name == "tv") return Criterion::tv;
  if (name == "mean") return Criterion::mean;
  if (name == "both") return Criterion::both;
  throw PreconditionError("criterion must be tv, mean or both, got '" + name + "'");
}

TruncationChoice min_truncation_level(double L, const WeightSequence& w, const Envelope& env,
                                      double t_max, State j, double target, Criterion criterion,
                                      std::uint64_t cap) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw PreconditionError("target must be finite and positive");
  }
  if (cap < 1) throw PreconditionError("search cap must be >= 1");
  const double log_target = std::log(target);
  auto report = [&](std::uint64_t n) { return truncation_bounds(L, w, env, n, t_max, j); };
  auto ok = [&](const TruncationReport& r) {
    switch (criterion) {
      case Criterion::tv:
        return r.log_tv_bound <= log_target;
      case Criterion::mean:
        return r.log_mean_bound <= log_target;
      case Criterion::both:
        break;
    }
    return r.log_tv_bound <= log_target && r.log_mean_bound <= log_target;
  };

  std::uint64_t lo = 0;  // largest level known to fail (0: none)
  std::uint64_t hi = 1;
  TruncationReport hi_report = report(hi);
  while (!ok(hi_report)) {
    if (hi >= cap) throw NumericalError("target not certifiable with these weights");
    lo = hi;
    hi = std::min(cap, hi * 2);
    hi_report = report(hi);
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    TruncationReport r = report(mid);
    if (ok(r)) {
      hi = mid;
      hi_report = std::move(r);
    } else {
      lo = mid;
    }
  }
  return {hi, hi_report};
}

TruncationChoice min_truncation_level(const QueueModel& model, const WeightSequence& w,
                                      const Envelope& env, double t_max, State j, double target,
                                      Criterion criterion, std::uint64_t cap) {
  return min_truncation_level(essential_bound(model).value, w, env, t_max, j, target, criterion,
                              cap);
}

namespace {

double log_rounded_paren(State j) {
  const double log_big = 14.0 * std::log(10.0);
  if (j == 0) return log_big;
  const double log_j = std::log(static_cast<double>(j)) + static_cast<double>(j + 2) * std::log(2.0);
  return log_add(log_j, log_big);
}

}  // namespace

double rounded_tv_form(std::uint64_t n, double t, State j) {
  if (t <= 0.0) return 0.0;
  return std::exp(std::log(t) + 13.0 * std::log(10.0) -
                  (static_cast<double>(n) - 3.0) * std::log(2.0) + log_rounded_paren(j));
}

double rounded_mean_form(std::uint64_t n, double t, State j) {
  if (t <= 0.0) return 0.0;
  return std::exp(std::log(t) + std::log(static_cast<double>(n) + 1.0) + 14.0 * std::log(10.0) -
                  (static_cast<double>(n) - 1.0) * std::log(2.0) + log_rounded_paren(j));
}

}  // namespace mtq
