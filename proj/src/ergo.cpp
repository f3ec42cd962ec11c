#include "mtq/ergo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "mtq/errors.hpp"

namespace mtq {

DecayTerm alpha_term(const QueueModel& model, const WeightSequence& w, State k) {
  DecayTerm term;
  term.c_lambda = 1.0 - w.ratio_up(k);
  term.c_mu = static_cast<double>(model.busy_servers(k + 1));
  if (k > 0) term.c_mu -= w.ratio_down(k) * static_cast<double>(model.busy_servers(k));
  term.c_xi = model.zeta()(k + 1);
  term.state = static_cast<std::int64_t>(k);
  return term;
}

double alpha_k(const QueueModel& model, const WeightSequence& w, State k, double t) {
  const DecayTerm c = alpha_term(model, w, k);
  return c.c_lambda * model.lambda()(t) + c.c_mu * model.mu()(t) + c.c_xi * model.xi()(t);
}

DecayFunction alpha_decay(const QueueModel& model, const WeightSequence& w,
                          std::uint64_t k_eval) {
  const std::uint64_t last = std::max({k_eval, w.head_length(), model.zeta().monotone_from()});
  std::vector<DecayTerm> terms;
  terms.reserve(last + 2);
  for (State k = 0; k <= last; ++k) terms.push_back(alpha_term(model, w, k));

  // Every k > last sees ratio r above and 1/r below.
  const double r = w.tail_ratio();
  const double servers = static_cast<double>(model.servers());
  double tail_mu = servers * (1.0 - 1.0 / r);
  if (model.servers() > last + 1) {
    const double first = static_cast<double>(last + 1);
    tail_mu = std::min(tail_mu, first + 1.0 - first / r);
  }
  terms.push_back({1.0 - r, tail_mu, model.zeta().inf_from(last + 2), -1});

  std::ostringstream desc;
  desc << "inf_k alpha_k, weights " << w.describe() << ", k_eval " << last;
  return DecayFunction(model, std::move(terms), desc.str());
}

DecayFunction linear_decay(const QueueModel& model, double c_lambda, double c_mu, double c_xi,
                           std::string description) {
  return DecayFunction(model, {{c_lambda, c_mu, c_xi, -1}}, std::move(description));
}

double alpha_inf(const QueueModel& model, const WeightSequence& w, double t,
                 std::uint64_t k_eval) {
  return alpha_decay(model, w, k_eval)(t);
}

double alpha_integral(const QueueModel& model, const WeightSequence& w, double s, double t,
                      std::uint64_t k_eval) {
  if (s > t) throw PreconditionError("integration interval is reversed (s > t)");
  return alpha_decay(model, w, k_eval).integral(s, t);
}

std::string to_string(ErgodicityVerdict::Outcome outcome) {
  switch (outcome) {
    case ErgodicityVerdict::Outcome::yes:
      return "yes";
    case ErgodicityVerdict::Outcome::no:
      return "no";
    case ErgodicityVerdict::Outcome::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

ErgodicityVerdict check_weak_ergodicity(const DecayFunction& alpha) {
  ErgodicityVerdict v;
  v.period = alpha.period();
  if (!v.period) {
    v.outcome = ErgodicityVerdict::Outcome::undetermined;
    v.reason = "rates are not periodic; undetermined by this tool";
    return v;
  }
  const double period = *v.period;
  v.period_mean = alpha.period_mean();
  v.alpha_min = std::numeric_limits<double>::infinity();
  v.alpha_max = -std::numeric_limits<double>::infinity();
  constexpr std::size_t kGrid = 1000;
  constexpr std::size_t kTraceEvery = 40;
  for (std::size_t i = 0; i <= kGrid; ++i) {
    const double t = period * static_cast<double>(i) / static_cast<double>(kGrid);
    const double value = alpha.fast_value(t);
    v.alpha_min = std::min(v.alpha_min, value);
    v.alpha_max = std::max(v.alpha_max, value);
    if (i % kTraceEvery == 0) {
      v.trace.push_back({t, alpha.term(alpha.argmin(t)).state, value});
    }
  }
  std::ostringstream why;
  why.precision(12);
  if (v.period_mean > 0.0) {
    v.outcome = ErgodicityVerdict::Outcome::yes;
    why << "mean of alpha over period " << period << " is " << v.period_mean
        << " > 0, so its integral diverges";
  } else {
    v.outcome = ErgodicityVerdict::Outcome::no;
    why << "mean of alpha over period " << period << " is " << v.period_mean
        << " <= 0; no positive mean found with these weights";
  }
  v.reason = why.str();
  return v;
}

ErgodicityVerdict check_weak_ergodicity(const QueueModel& model, const WeightSequence& w,
                                        std::uint64_t k_eval) {
  return check_weak_ergodicity(alpha_decay(model, w, k_eval));
}

namespace {

void require_period_multiple(const DecayFunction& alpha, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw PreconditionError("envelope period must be positive");
  }
  const auto base = alpha.period();
  if (!base) throw PreconditionError("rates are not periodic; no envelope can be fitted");
  const double cycles = period / *base;
  if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles) ||
      std::round(cycles) < 1.0) {
    throw PreconditionError("envelope period must be a multiple of the rate period");
  }
}

}  // namespace

Envelope fit_envelope(const DecayFunction& alpha, double period, EnvelopeStrategy strategy) {
  require_period_multiple(alpha, period);
  Envelope env;
  env.strategy = strategy;
  env.alpha_description = alpha.description();

  if (strategy == EnvelopeStrategy::uniform_minimum) {
    env.a = alpha.minimum(0.0, period);
    if (!(env.a > 0.0)) {
      throw PreconditionError("no exponential envelope: alpha is not bounded away from 0");
    }
    return env;
  }

  env.a = alpha.integral(0.0, period) / period;
  if (!(env.a > 0.0)) {
    throw PreconditionError("no exponential envelope: mean of alpha over a period is not positive");
  }
  // F(u) = a u - int_0^u alpha is periodic; sup_{s<=t} int_s^t (a - alpha)
  // equals max F - min F.
  const double a = env.a;
  auto F = [&](double u) { return a * u - alpha.cumulative(u); };
  constexpr std::size_t kGrid = 10000;
  const double h = period / static_cast<double>(kGrid);
  std::size_t arg_max = 0;
  std::size_t arg_min = 0;
  double f_max = -std::numeric_limits<double>::infinity();
  double f_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= kGrid; ++i) {
    const double f = F(h * static_cast<double>(i));
    if (f > f_max) {
      f_max = f;
      arg_max = i;
    }
    if (f < f_min) {
      f_min = f;
      arg_min = i;
    }
  }
  auto bracket = [&](std::size_t i) {
    const double c = h * static_cast<double>(i);
    return std::pair{std::max(0.0, c - h), std::min(period, c + h)};
  };
  {
    const auto [lo, hi] = bracket(arg_max);
    const auto r = boost::math::tools::brent_find_minima([&](double u) { return -F(u); }, lo, hi, 52);
    f_max = std::max(f_max, -r.second);
  }
  {
    const auto [lo, hi] = bracket(arg_min);
    const auto r = boost::math::tools::brent_find_minima(F, lo, hi, 52);
    f_min = std::min(f_min, r.second);
  }
  env.log_M = std::max(0.0, f_max - f_min);
  env.M = std::exp(env.log_M);
  return env;
}

Envelope fit_envelope(const QueueModel& model, const WeightSequence& w, double period,
                      std::uint64_t k_eval) {
  return fit_envelope(alpha_decay(model, w, k_eval), period);
}

EnvelopeCheck verify_envelope(const DecayFunction& alpha, const Envelope& env, double period,
                              std::size_t grid, double slack) {
  EnvelopeCheck check;
  check.worst_log_excess = -std::numeric_limits<double>::infinity();
  grid = std::max<std::size_t>(grid, 2);
  const double span = 2.0 * period;
  std::vector<double> nodes(grid);
  std::vector<double> cum(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    nodes[i] = span * static_cast<double>(i) / static_cast<double>(grid - 1);
    cum[i] = alpha.cumulative(nodes[i]);
  }
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = i; j < grid; ++j) {
      const double lhs = -(cum[j] - cum[i]);
      const double rhs = env.log_M - env.a * (nodes[j] - nodes[i]);
      check.worst_log_excess = std::max(check.worst_log_excess, lhs - rhs);
      ++check.pairs;
    }
  }
  check.ok = check.worst_log_excess <= std::log1p(slack);
  return check;
}

double tv_distance_bound(const DecayFunction& alpha, const WeightSequence& w, double s, double t,
                         const ProbabilityVector& p1, const ProbabilityVector& p2) {
  if (s > t) throw PreconditionError("tv_distance_bound needs s <= t");
  const std::size_t n = std::max(p1.size(), p2.size());
  double weighted = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = i < p1.size() ? p1[i] : 0.0;
    const double b = i < p2.size() ? p2[i] : 0.0;
    if (a != b) weighted += w.g(i) * std::abs(a - b);
  }
  if (weighted == 0.0) return 0.0;
  return 4.0 * weighted * std::exp(-alpha.integral(s, t));
}

double tv_distance_bound(const QueueModel& model, const WeightSequence& w, double s, double t,
                         const ProbabilityVector& p1, const ProbabilityVector& p2,
                         std::uint64_t k_eval) {
  return tv_distance_bound(alpha_decay(model, w, k_eval), w, s, t, p1, p2);
}

double limiting_mean_bound(const DecayFunction& alpha, const WeightSequence& w, double t,
                           State k) {
  const double W = w.W();
  if (!(W > 0.0)) throw NumericalError("limiting mean not certified: W = 0 for these weights");
  if (k == 0) return 0.0;
  return 4.0 / W * w.g(k) * std::exp(-alpha.integral(0.0, t));
}

double limiting_mean_bound(const QueueModel& model, const WeightSequence& w, double t, State k,
                           std::uint64_t k_eval) {
  return limiting_mean_bound(alpha_decay(model, w, k_eval), w, t, k);
}

std::string to_string(Regime mode) {
  return mode == Regime::catastrophe ? "catastrophe" : "service";
}

Regime parse_regime(const std::string& name) {
  if (name == "catastrophe") return Regime::catastrophe;
  if (name == "service") return Regime::service;
  throw PreconditionError("regime must be 'catastrophe' or 'service', got '" + name + "'");
}

DecayFunction regime_decay(const QueueModel& model, Regime mode, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("eps must be positive");
  std::ostringstream desc;
  desc.precision(17);
  if (mode == Regime::catastrophe) {
    const double zeta = model.zeta().inf();
    desc << zeta << " xi - " << eps << " lambda";
    return linear_decay(model, -eps, 0.0, zeta, desc.str());
  }
  const double scale = eps / (1.0 + eps);
  desc << scale << " (S mu - " << (1.0 + eps) << " lambda)";
  return linear_decay(model, -scale * (1.0 + eps), scale * static_cast<double>(model.servers()),
                      0.0, desc.str());
}

void check_regime(const QueueModel& model, Regime mode, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("eps must be positive");
  if (mode == Regime::catastrophe && !(model.zeta().inf() > 0.0)) {
    throw PreconditionError("catastrophe regime needs inf_k zeta_k > 0");
  }
  const DecayFunction rate = regime_decay(model, mode, eps);
  if (!rate.period()) {
    throw PreconditionError("regime condition undetermined: rates are not periodic");
  }
  if (!(rate.period_mean() > 0.0)) {
    std::ostringstream msg;
    msg << (mode == Regime::catastrophe
                ? "int_0^inf (zeta xi(t) - eps lambda(t)) dt = +inf fails"
                : "int_0^inf (S mu(t) - (1 + eps) lambda(t)) dt = +inf fails")
        << ": period mean is " << rate.period_mean();
    throw PreconditionError(msg.str());
  }
}

RegimeBound regime_bounds(const QueueModel& model, Regime mode, double eps, double t, State k) {
  if (!(t >= 0.0)) throw PreconditionError("t must be >= 0");
  check_regime(model, mode, eps);
  const DecayFunction rate = regime_decay(model, mode, eps);
  RegimeBound b;
  b.mode = mode;
  b.eps = eps;
  b.t = t;
  b.k = k;
  b.exponent = rate.integral(0.0, t);
  b.W = WeightSequence::powers(1.0 + eps).W();
  const double log_tv = std::log(4.0) + static_cast<double>(k) * std::log1p(eps) - std::log(eps) -
                        b.exponent;
  b.tv_bound = std::exp(log_tv);
  b.mean_bound = std::exp(log_tv - std::log(b.W));
  if (mode == Regime::service && model.servers() > 1) {
    b.note = "service-regime rate assumes every busy state is served at S mu(t)";
  }
  return b;
}

EpsilonChoice sweep_epsilon(const QueueModel& model, Regime mode, double t, State k,
                            std::size_t points, double eps_min, double eps_max) {
  if (!(eps_min > 0.0) || !(eps_max >= eps_min) || points < 1) {
    throw PreconditionError("eps sweep needs 0 < eps_min <= eps_max and at least one point");
  }
  EpsilonChoice best;
  bool found = false;
  const double log_lo = std::log(eps_min);
  const double log_hi = std::log(eps_max);
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    const double eps = std::exp(log_lo + frac * (log_hi - log_lo));
    RegimeBound b;
    try {
      b = regime_bounds(model, mode, eps, t, k);
    } catch (const PreconditionError&) {
      continue;
    }
    ++best.feasible;
    if (!found || b.tv_bound < best.bound.tv_bound) {
      best.eps = eps;
      best.bound = b;
      found = true;
    }
  }
  if (!found) {
    throw PreconditionError("no eps in the sweep satisfies the " + to_string(mode) +
                            " regime condition");
  }
  return best;
}

LogNormOracle lognorm_oracle(const QueueModel& model, const WeightSequence& w, std::size_t n,
                             double t) {
  if (n < 4) throw PreconditionError("lognorm_oracle needs n >= 4");
  const Eigen::MatrixXd b = reduced_matrix(model, n, t);
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    d.row(i).tail(size - i).setConstant(w.d(static_cast<std::uint64_t>(i) + 1));
  }
  // X = B D^{-1} from X D = B, then C = D X.
  Eigen::MatrixXd x = b;
  d.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(x);
  const Eigen::MatrixXd c = d.triangularView<Eigen::Upper>() * x;

  LogNormOracle out;
  out.per_column.resize(n);
  out.gamma = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < size; ++j) {
    double col = c(j, j);
    for (Eigen::Index i = 0; i < size; ++i) {
      if (i != j) col += std::abs(c(i, j));
    }
    out.per_column[static_cast<std::size_t>(j)] = col;
    out.gamma = std::max(out.gamma, col);
  }
  return out;
}

BoundReport bound_report(const QueueModel& model, const WeightSequence& w,
                         const std::vector<double>& times, const std::vector<State>& states,
                         std::uint64_t k_eval) {
  const DecayFunction alpha = alpha_decay(model, w, k_eval);
  BoundReport report;
  report.verdict = check_weak_ergodicity(alpha);
  report.weights = w.describe();
  report.W = w.W();
  if (report.verdict.outcome == ErgodicityVerdict::Outcome::yes) {
    report.envelope = fit_envelope(alpha, *report.verdict.period);
  }
  for (double t : times) {
    if (!(t >= 0.0)) throw PreconditionError("bound times must be >= 0");
    const double decay = std::exp(-alpha.integral(0.0, t));
    for (State k : states) {
      BoundRow row;
      row.t = t;
      row.k = k;
      row.tv_bound = k == 0 ? 0.0 : 4.0 * w.g(k) * decay;
      if (report.W > 0.0) row.mean_bound = k == 0 ? 0.0 : 4.0 / report.W * w.g(k) * decay;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace mtq
