#ifndef MTQ_RATE_HPP
#define MTQ_RATE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mtq {

/// sin_amp * sin(2 pi freq t) + cos_amp * cos(2 pi freq t); freq in cycles
/// per unit time.
struct TrigTerm {
  double sin_amp = 0.0;
  double cos_amp = 0.0;
  double freq = 1.0;
};

/// Adds `level` on the half-open window [begin, end).
struct StepTerm {
  double begin = 0.0;
  double end = 0.0;
  double level = 0.0;
};

struct GridExtrema {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;
};

/// A time-varying intensity: constant + finite trigonometric series + finite
/// sum of step windows. Instances built through the public constructor are
/// checked to be nonnegative on [0, inf); evaluation never fails afterwards.
class RateExpr {
 public:
  RateExpr() = default;
  explicit RateExpr(double constant, std::vector<TrigTerm> trig = {},
                    std::vector<StepTerm> steps = {});

  static RateExpr constant(double c) { return RateExpr(c); }

  /// Signed linear combination of rate expressions. The result is not
  /// required to be nonnegative (used for decay-rate expressions such as
  /// mu + xi - lambda).
  static RateExpr combination(std::span<const double> weights,
                              std::span<const RateExpr* const> terms);

  double operator()(double t) const;

  /// Exact integral over [s, t]; throws PreconditionError when s > t.
  double integral(double s, double t) const;

  double constant_term() const { return constant_; }
  const std::vector<TrigTerm>& trig_terms() const { return trig_; }
  const std::vector<StepTerm>& step_terms() const { return steps_; }

  bool is_zero() const;
  bool is_constant() const { return trig_.empty() && steps_.empty(); }
  bool has_steps() const { return !steps_.empty(); }

  /// Bound on |d/dt| of the trigonometric part.
  double lipschitz() const;

  /// Sampled min/max over [t0, t1] on a grid of the given spacing. Step
  /// boundaries are always sampled from both sides.
  GridExtrema grid_extrema(double t0, double t1, double grid_step) const;

  /// Rigorous upper bound on sup over [t0, t1]: grid maximum plus the
  /// Lipschitz slack of half a grid cell.
  double sup_bound(double t0, double t1, double grid_step) const;

  /// Rigorous lower bound on inf over [t0, t1].
  double inf_bound(double t0, double t1, double grid_step) const;

  /// Last step boundary, 0 when there are no step terms.
  double last_breakpoint() const;

 private:
  struct Unchecked {};
  RateExpr(Unchecked, double constant, std::vector<TrigTerm> trig,
           std::vector<StepTerm> steps);

  double continuous_part(double t) const;
  double active_level(double t) const;
  void validate() const;

  double constant_ = 0.0;
  std::vector<TrigTerm> trig_;
  std::vector<StepTerm> steps_;
};

double eval_rate(const RateExpr& expr, double t);
double integrate_rate(const RateExpr& expr, double s, double t);

/// Smallest common period of the trigonometric terms of all expressions.
/// Returns 1 when every expression is constant (any period works) and
/// nullopt when step terms are present or the frequencies are not
/// commensurate within 1e-9.
std::optional<double> common_period(std::span<const RateExpr* const> exprs);

}  // namespace mtq

#endif  // MTQ_RATE_HPP
