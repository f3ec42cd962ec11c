#include "mtq/kfe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtq/errors.hpp"

namespace mtq {

namespace {

constexpr double kStabilityLimit = 0.1;
constexpr double kClipFloor = -1e-10;

}  // namespace

double stability_rate(const QueueModel& model, std::size_t n) {
  return TruncatedChain(model, n).max_exit_rate();
}

double default_step(const QueueModel& model, std::size_t n) {
  const double rate = stability_rate(model, n);
  if (!(rate > 0.0)) return 0.1;
  const double limit = kStabilityLimit / rate;
  const double decade = std::pow(10.0, std::floor(std::log10(limit)));
  for (double m : {5.0, 2.0, 1.0}) {
    if (m * decade <= limit) return m * decade;
  }
  return decade;
}

ForwardSolver::ForwardSolver(const QueueModel& model, std::size_t n, const ProbabilityVector& p0,
                             double t0, double h)
    : model_(model), chain_(model_, n), h_(h), t_(t0), anchor_(t0) {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("step h must be positive");
  if (!std::isfinite(t0)) throw PreconditionError("t0 must be finite");
  if (p0.level() != n) {
    std::ostringstream msg;
    msg << "initial distribution has level " << p0.level() << ", expected " << n;
    throw PreconditionError(msg.str());
  }
  const double rate = chain_.max_exit_rate();
  if (h * rate > kStabilityLimit) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "step h = " << h << " too large: h * Lambda_n = " << h * rate
        << " > 0.1 with Lambda_n = " << rate;
    throw PreconditionError(msg.str());
  }
  p_.assign(p0.probs().begin(), p0.probs().end());
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->assign(n + 1, 0.0);
}

ProbabilityVector ForwardSolver::state() const { return ProbabilityVector(p_); }

void ForwardSolver::step(double dt) {
  const std::size_t size = p_.size();
  const double half = 0.5 * dt;
  chain_.apply(t_, p_, k1_);
  for (std::size_t i = 0; i < size; ++i) tmp_[i] = p_[i] + half * k1_[i];
  chain_.apply(t_ + half, tmp_, k2_);
  for (std::size_t i = 0; i < size; ++i) tmp_[i] = p_[i] + half * k2_[i];
  chain_.apply(t_ + half, tmp_, k3_);
  for (std::size_t i = 0; i < size; ++i) tmp_[i] = p_[i] + dt * k3_[i];
  chain_.apply(t_ + dt, tmp_, k4_);

  const double w = dt / 6.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double v = p_[i] + w * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    if (v < 0.0) {
      if (v < kClipFloor) {
        std::ostringstream msg;
        msg << "integration unstable: p_" << i << " = " << v << " at t = " << t_ + dt;
        throw NumericalError(msg.str());
      }
      v = 0.0;
    }
    p_[i] = v;
    sum += v;
  }
  max_drift_ = std::max(max_drift_, std::abs(sum - 1.0));
  for (double& v : p_) v /= sum;
  // Full steps land on anchor + k h so long runs do not accumulate rounding.
  if (dt == h_) {
    t_ = anchor_ + static_cast<double>(++full_) * h_;
  } else {
    t_ += dt;
    anchor_ = t_;
    full_ = 0;
  }
  ++steps_;
}

void ForwardSolver::advance_to(double t) {
  if (t < t_) throw PreconditionError("cannot integrate backwards in time");
  while (t - t_ > h_ * (1.0 + 1e-9)) step(h_);
  // What remains is at most h; skip a step lost to rounding.
  if (t - t_ > 1e-14 * std::max(1.0, std::abs(t))) step(t - t_);
  t_ = t;
  anchor_ = t;
  full_ = 0;
}

Trajectory integrate_forward(const QueueModel& model, std::size_t n, const ProbabilityVector& p0,
                             double t0, double t1, double h, std::size_t record_every) {
  if (!(t1 >= t0)) throw PreconditionError("integration needs t0 <= t1");
  if (record_every < 1) throw PreconditionError("record_every must be >= 1");
  ForwardSolver solver(model, n, p0, t0, h);
  Trajectory traj;
  auto record = [&] {
    traj.times.push_back(solver.time());
    traj.states.push_back(solver.state());
    traj.means.push_back(traj.states.back().mean());
  };
  record();
  std::size_t since = 0;
  while (t1 - solver.time() > h * (1.0 + 1e-9)) {
    solver.step(h);
    if (++since == record_every) {
      record();
      since = 0;
    }
  }
  if (solver.time() != t1) {
    solver.advance_to(t1);
    record();
  } else if (since != 0) {
    record();
  }
  traj.max_drift = solver.max_drift();
  traj.steps = solver.steps();
  return traj;
}

LimitingRegime limiting_regime(const QueueModel& model, std::size_t n, double settle,
                               double period, double tol, double h, std::size_t samples) {
  if (!(tol >= 1e-12)) throw PreconditionError("tol must be >= 1e-12");
  if (!(settle >= 0.0)) throw PreconditionError("settle time must be >= 0");
  if (!(period > 0.0)) throw PreconditionError("period must be positive");
  if (samples < 2) throw PreconditionError("need at least 2 samples per period");
  const auto model_period = model.period();
  if (!model_period) throw PreconditionError("rates are not periodic");
  const double cycles = period / *model_period;
  if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles)) {
    throw PreconditionError("period must be a multiple of the rate period");
  }

  LimitingRegime out;
  out.witness_state = n / 2;
  ForwardSolver anchor(model, n, ProbabilityVector::point_mass(n, 0), 0.0, h);
  ForwardSolver witness(model, n, ProbabilityVector::point_mass(n, out.witness_state), 0.0, h);
  anchor.advance_to(settle);
  witness.advance_to(settle);
  out.start_gap = l1_distance(anchor.probs(), witness.probs());

  std::vector<std::vector<double>> first;
  first.reserve(samples);
  Trajectory& traj = out.trajectory;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = settle + period * static_cast<double>(i) / static_cast<double>(samples - 1);
    anchor.advance_to(t);
    traj.times.push_back(t);
    traj.states.push_back(anchor.state());
    traj.means.push_back(traj.states.back().mean());
    first.push_back(anchor.probs());
  }
  out.period_gap = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t =
        settle + period + period * static_cast<double>(i) / static_cast<double>(samples - 1);
    anchor.advance_to(t);
    const double gap = l1_distance(first[i], anchor.probs());
    if (i == 0) out.period_gap = gap;
    out.max_period_gap = std::max(out.max_period_gap, gap);
  }
  traj.max_drift = std::max(anchor.max_drift(), witness.max_drift());
  traj.steps = anchor.steps();

  if (out.start_gap > tol || out.period_gap > tol) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "limiting regime not reached: ||p_e0 - p_e" << out.witness_state << "|| = "
        << out.start_gap << ", ||p(settle) - p(settle + period)|| = " << out.period_gap
        << ", tol = " << tol;
    throw NumericalError(msg.str());
  }
  return out;
}

double weighted_distance(const WeightSequence& w, std::span<const double> p1,
                         std::span<const double> p2) {
  const std::size_t size = std::max(p1.size(), p2.size());
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t i = size; i-- > 1;) {
    const double a = i < p1.size() ? p1[i] : 0.0;
    const double b = i < p2.size() ? p2[i] : 0.0;
    tail += a - b;
    total += w.d(i) * std::abs(tail);
  }
  return total;
}

std::vector<PairDistance> pair_distance_trace(const QueueModel& model, const WeightSequence& w,
                                              std::size_t n, std::size_t j1, std::size_t j2,
                                              double t1, double h, std::size_t grid) {
  if (j1 == j2) throw PreconditionError("pair_distance_trace needs j1 != j2");
  if (j1 > n || j2 > n) throw PreconditionError("initial states must be <= n");
  if (!(t1 >= 0.0)) throw PreconditionError("t1 must be >= 0");
  if (grid < 2) throw PreconditionError("need at least 2 grid points");
  ForwardSolver a(model, n, ProbabilityVector::point_mass(n, j1), 0.0, h);
  ForwardSolver b(model, n, ProbabilityVector::point_mass(n, j2), 0.0, h);
  std::vector<PairDistance> out;
  out.reserve(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = t1 * static_cast<double>(i) / static_cast<double>(grid - 1);
    a.advance_to(t);
    b.advance_to(t);
    out.push_back({t, l1_distance(a.probs(), b.probs()), weighted_distance(w, a.probs(), b.probs())});
  }
  return out;
}

}  // namespace mtq
