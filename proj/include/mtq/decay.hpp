#ifndef MTQ_DECAY_HPP
#define MTQ_DECAY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtq/model.hpp"
#include "mtq/rate.hpp"

namespace mtq {

/// One linear candidate c_lambda * lambda(t) + c_mu * mu(t) + c_xi * xi(t).
/// `state` is the index k of alpha_k it came from, or -1 for synthetic terms
/// (the k > k_eval tail bound, regime decay rates, ...).
struct DecayTerm {
  double c_lambda = 0.0;
  double c_mu = 0.0;
  double c_xi = 0.0;
  std::int64_t state = -1;
};

/// Stretch of time on which one candidate attains the minimum.
struct DecaySegment {
  double begin = 0.0;
  double end = 0.0;
  std::size_t term = 0;
};

/// A decay rate of the form alpha(t) = min over candidates of linear
/// combinations of the model's three base rates. Every alpha used by the
/// bounds (the infimum over alpha_k, its closed-form lower bounds, the
/// regime rates) has this shape, so integrals are exact: the minimising
/// candidate is tracked and each piece is integrated analytically.
class DecayFunction {
 public:
  DecayFunction(const QueueModel& model, std::vector<DecayTerm> terms, std::string description);

  double operator()(double t) const;
  std::size_t argmin(double t) const;

  std::size_t size() const { return terms_.size(); }
  const DecayTerm& term(std::size_t i) const { return terms_[i]; }
  double term_value(std::size_t i, double t) const;
  double term_integral(std::size_t i, double s, double t) const;

  /// Exact integral over [s, t]; cumulative(t) - cumulative(s) for periodic
  /// rates.
  double integral(double s, double t) const;

  /// Same, without period reduction and with an explicit number of argmin
  /// samples used to locate breakpoints (for short intervals).
  double integral(double s, double t, std::size_t samples) const;

  /// Adaptive Gauss-Kronrod integration of operator(); the reference the
  /// closed-form path is checked against.
  double integral_quadrature(double s, double t, double abs_tol = 1e-10) const;

  /// Pieces of [s, t] with a constant minimising candidate. Breakpoints are
  /// located by bisection after sampling `samples` points.
  std::vector<DecaySegment> segments(double s, double t, std::size_t samples = 1000) const;

  /// int_0^u alpha. For periodic rates this reads the cached one-period
  /// table of minimiser segments and their prefix integrals.
  double cumulative(double u) const;

  /// alpha(u) read from the cached segment table (periodic rates), falling
  /// back to a full argmin scan otherwise.
  double fast_value(double u) const;

  std::optional<double> period() const { return period_; }
  /// Mean over one period; throws PreconditionError for aperiodic rates.
  double period_mean() const;

  /// Min over [t0, t1]: grid search refined by Brent around the best grid
  /// point, lowered by a 1e-9 relative margin.
  double minimum(double t0, double t1, std::size_t grid = 10000) const;

  const std::string& description() const { return description_; }

 private:
  void split(double l, double r, std::size_t a, std::size_t b,
             std::vector<DecaySegment>& out) const;

  RateExpr lambda_;
  RateExpr mu_;
  RateExpr xi_;
  std::vector<DecayTerm> terms_;
  std::string description_;
  std::optional<double> period_;
  double period_integral_ = 0.0;
  std::vector<DecaySegment> table_;  // one period, periodic rates only
  std::vector<double> prefix_;       // int_0^{table_[j].begin} alpha
};

}  // namespace mtq

#endif  // MTQ_DECAY_HPP
