#include "mtq/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mtq/errors.hpp"

namespace mtq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kValidationPointsPerPeriod = 10000;

// Length of [s, t] covered by [a, b).
double overlap(double s, double t, double a, double b) {
  const double lo = std::max(s, a);
  const double hi = std::min(t, b);
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace

RateExpr::RateExpr(double constant, std::vector<TrigTerm> trig,
                   std::vector<StepTerm> steps)
    : constant_(constant), trig_(std::move(trig)), steps_(std::move(steps)) {
  if (!std::isfinite(constant_)) {
    throw PreconditionError("rate constant term must be finite");
  }
  for (const auto& term : trig_) {
    if (!std::isfinite(term.sin_amp) || !std::isfinite(term.cos_amp)) {
      throw PreconditionError("trigonometric amplitudes must be finite");
    }
    if (!(term.freq > 0.0) || !std::isfinite(term.freq)) {
      throw PreconditionError("trigonometric frequency must be positive");
    }
  }
  for (const auto& step : steps_) {
    if (!(step.begin >= 0.0) || !(step.end > step.begin) ||
        !std::isfinite(step.end) || !std::isfinite(step.level)) {
      throw PreconditionError("step term needs 0 <= begin < end and a finite level");
    }
  }
  validate();
}

RateExpr::RateExpr(Unchecked, double constant, std::vector<TrigTerm> trig,
                   std::vector<StepTerm> steps)
    : constant_(constant), trig_(std::move(trig)), steps_(std::move(steps)) {}

RateExpr RateExpr::combination(std::span<const double> weights,
                               std::span<const RateExpr* const> terms) {
  if (weights.size() != terms.size()) {
    throw PreconditionError("combination needs one weight per term");
  }
  double constant = 0.0;
  std::vector<TrigTerm> trig;
  std::vector<StepTerm> steps;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const RateExpr& e = *terms[i];
    constant += w * e.constant_;
    for (const auto& term : e.trig_) {
      auto same_freq = std::find_if(trig.begin(), trig.end(), [&](const TrigTerm& x) {
        return x.freq == term.freq;
      });
      if (same_freq != trig.end()) {
        same_freq->sin_amp += w * term.sin_amp;
        same_freq->cos_amp += w * term.cos_amp;
      } else {
        trig.push_back({w * term.sin_amp, w * term.cos_amp, term.freq});
      }
    }
    for (const auto& step : e.steps_) {
      steps.push_back({step.begin, step.end, w * step.level});
    }
  }
  return RateExpr(Unchecked{}, constant, std::move(trig), std::move(steps));
}

double RateExpr::continuous_part(double t) const {
  double value = constant_;
  for (const auto& term : trig_) {
    const double phase = kTwoPi * term.freq * t;
    value += term.sin_amp * std::sin(phase) + term.cos_amp * std::cos(phase);
  }
  return value;
}

double RateExpr::active_level(double t) const {
  double level = 0.0;
  for (const auto& step : steps_) {
    if (t >= step.begin && t < step.end) level += step.level;
  }
  return level;
}

double RateExpr::operator()(double t) const {
  return continuous_part(t) + active_level(t);
}

double RateExpr::integral(double s, double t) const {
  if (s > t) {
    throw PreconditionError("integration interval is reversed (s > t)");
  }
  if (s == t) return 0.0;
  double value = constant_ * (t - s);
  for (const auto& term : trig_) {
    const double w = kTwoPi * term.freq;
    value += term.sin_amp * (std::cos(w * s) - std::cos(w * t)) / w;
    value += term.cos_amp * (std::sin(w * t) - std::sin(w * s)) / w;
  }
  for (const auto& step : steps_) {
    value += step.level * overlap(s, t, step.begin, step.end);
  }
  return value;
}

bool RateExpr::is_zero() const {
  if (constant_ != 0.0) return false;
  for (const auto& term : trig_) {
    if (term.sin_amp != 0.0 || term.cos_amp != 0.0) return false;
  }
  for (const auto& step : steps_) {
    if (step.level != 0.0) return false;
  }
  return true;
}

double RateExpr::lipschitz() const {
  double lip = 0.0;
  for (const auto& term : trig_) {
    lip += kTwoPi * term.freq * (std::abs(term.sin_amp) + std::abs(term.cos_amp));
  }
  return lip;
}

double RateExpr::last_breakpoint() const {
  double last = 0.0;
  for (const auto& step : steps_) last = std::max(last, step.end);
  return last;
}

GridExtrema RateExpr::grid_extrema(double t0, double t1, double grid_step) const {
  if (!(t1 >= t0) || !(grid_step > 0.0)) {
    throw PreconditionError("grid_extrema needs t0 <= t1 and a positive step");
  }
  // Pieces between step boundaries; on each piece the level is constant.
  std::vector<double> cuts{t0, t1};
  for (const auto& step : steps_) {
    if (step.begin > t0 && step.begin < t1) cuts.push_back(step.begin);
    if (step.end > t0 && step.end < t1) cuts.push_back(step.end);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  GridExtrema out{std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(), grid_step};
  auto visit = [&](double v) {
    out.min = std::min(out.min, v);
    out.max = std::max(out.max, v);
  };
  if (cuts.size() == 1) {
    visit((*this)(t0));
    return out;
  }
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double u = cuts[p];
    const double v = cuts[p + 1];
    const double level = active_level(u);
    const auto cells = static_cast<std::size_t>(std::ceil((v - u) / grid_step));
    const std::size_t m = std::max<std::size_t>(cells, 1);
    for (std::size_t i = 0; i <= m; ++i) {
      const double tau = (i == m) ? v : u + (v - u) * static_cast<double>(i) / static_cast<double>(m);
      visit(continuous_part(tau) + level);
    }
  }
  return out;
}

double RateExpr::sup_bound(double t0, double t1, double grid_step) const {
  const GridExtrema e = grid_extrema(t0, t1, grid_step);
  return e.max + 0.5 * lipschitz() * grid_step;
}

double RateExpr::inf_bound(double t0, double t1, double grid_step) const {
  const GridExtrema e = grid_extrema(t0, t1, grid_step);
  return e.min - 0.5 * lipschitz() * grid_step;
}

void RateExpr::validate() const {
  double amplitude = 0.0;
  for (const auto& term : trig_) {
    amplitude += std::abs(term.sin_amp) + std::abs(term.cos_amp);
  }
  double negative_levels = 0.0;
  for (const auto& step : steps_) {
    if (step.level < 0.0) negative_levels += -step.level;
  }
  if (constant_ >= amplitude + negative_levels) return;

  // Fall back to dense sampling over the step windows plus one trigonometric
  // period beyond them.
  double period = 1.0;
  if (!trig_.empty()) {
    const RateExpr trig_only(Unchecked{}, 0.0, trig_, {});
    const RateExpr* ptr = &trig_only;
    if (auto p = common_period(std::span<const RateExpr* const>(&ptr, 1))) {
      period = *p;
    } else {
      double min_freq = trig_.front().freq;
      for (const auto& term : trig_) min_freq = std::min(min_freq, term.freq);
      period = 100.0 / min_freq;
    }
  }
  const double horizon = last_breakpoint() + period;
  const GridExtrema e =
      grid_extrema(0.0, horizon, period / static_cast<double>(kValidationPointsPerPeriod));
  if (e.min < 0.0) {
    throw PreconditionError("rate expression takes a negative value (" +
                            std::to_string(e.min) + ") on [0, " +
                            std::to_string(horizon) + "]");
  }
}

double eval_rate(const RateExpr& expr, double t) { return expr(t); }

double integrate_rate(const RateExpr& expr, double s, double t) {
  return expr.integral(s, t);
}

std::optional<double> common_period(std::span<const RateExpr* const> exprs) {
  std::vector<double> freqs;
  for (const RateExpr* e : exprs) {
    if (e->has_steps()) return std::nullopt;
    for (const auto& term : e->trig_terms()) {
      if (term.sin_amp != 0.0 || term.cos_amp != 0.0) freqs.push_back(term.freq);
    }
  }
  if (freqs.empty()) return 1.0;
  const double base = *std::min_element(freqs.begin(), freqs.end());
  for (int q = 1; q <= 1000; ++q) {
    const double period = q / base;
    const bool fits = std::all_of(freqs.begin(), freqs.end(), [&](double f) {
      const double cycles = period * f;
      return std::abs(cycles - std::round(cycles)) <= 1e-9 * std::max(1.0, cycles);
    });
    if (fits) return period;
  }
  return std::nullopt;
}

}  // namespace mtq
