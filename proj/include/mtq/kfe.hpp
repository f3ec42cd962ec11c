#ifndef MTQ_KFE_HPP
#define MTQ_KFE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "mtq/distribution.hpp"
#include "mtq/model.hpp"
#include "mtq/weights.hpp"

namespace mtq {

struct Trajectory {
  std::vector<double> times;
  std::vector<ProbabilityVector> states;
  std::vector<double> means;
  double max_drift = 0.0;  ///< largest |sum p - 1| seen before renormalising
  std::size_t steps = 0;
};

/// Fixed-step classical RK4 on dp/dt = A_n(t) p. Each step is followed by
/// clipping of rounding-level negatives and renormalisation.
class ForwardSolver {
 public:
  /// Throws PreconditionError when h * Lambda_n > 0.1.
  ForwardSolver(const QueueModel& model, std::size_t n, const ProbabilityVector& p0, double t0,
                double h);
  ForwardSolver(const ForwardSolver&) = delete;
  ForwardSolver& operator=(const ForwardSolver&) = delete;

  double time() const { return t_; }
  double step_size() const { return h_; }
  double max_drift() const { return max_drift_; }
  std::size_t steps() const { return steps_; }
  const std::vector<double>& probs() const { return p_; }
  ProbabilityVector state() const;

  /// One step of length dt (0 < dt <= h).
  void step(double dt);

  /// Full steps up to t, then one shortened step to land on t exactly.
  void advance_to(double t);

 private:
  QueueModel model_;
  TruncatedChain chain_;  // refers to model_
  double h_;
  double t_;
  double anchor_;           // time of the last off-grid step
  std::size_t full_ = 0;    // full steps of h since anchor_
  std::vector<double> p_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
  double max_drift_ = 0.0;
  std::size_t steps_ = 0;
};

/// Lambda_n bound used by the stability precondition.
double stability_rate(const QueueModel& model, std::size_t n);

/// Largest step of the form {1, 2, 5} x 10^m with h * Lambda_n <= 0.1.
double default_step(const QueueModel& model, std::size_t n);

inline constexpr std::size_t kDefaultRecordEvery = 1000;

/// Records every `record_every` steps plus both endpoints.
Trajectory integrate_forward(const QueueModel& model, std::size_t n, const ProbabilityVector& p0,
                             double t0, double t1, double h,
                             std::size_t record_every = kDefaultRecordEvery);

struct LimitingRegime {
  Trajectory trajectory;       ///< from e_0, sampled on [settle, settle + period]
  double start_gap = 0.0;      ///< ||p_{e_0}(settle) - p_{e_m}(settle)||_1, m = floor(n/2)
  double period_gap = 0.0;     ///< ||p(settle) - p(settle + period)||_1
  double max_period_gap = 0.0; ///< max over samples of ||p(t) - p(t + period)||_1
  std::size_t witness_state = 0;
};

/// Integrates from e_0 and e_{floor(n/2)} to `settle`, checks both witnesses
/// against tol, and returns the e_0 trajectory over one period. Throws
/// NumericalError carrying the achieved distances when a witness fails.
LimitingRegime limiting_regime(const QueueModel& model, std::size_t n, double settle,
                               double period, double tol, double h, std::size_t samples = 101);

struct PairDistance {
  double t = 0.0;
  double l1 = 0.0;
  double weighted = 0.0;  ///< ||D_n z||_1 with z_k = p1_k - p2_k, k >= 1
};

/// ||D z||_1 = sum_{i>=1} d_i |sum_{k>=i} z_k|.
double weighted_distance(const WeightSequence& w, std::span<const double> p1,
                         std::span<const double> p2);

/// Integrates from e_{j1} and e_{j2} on a shared grid of `grid` points over
/// [0, t1].
std::vector<PairDistance> pair_distance_trace(const QueueModel& model, const WeightSequence& w,
                                              std::size_t n, std::size_t j1, std::size_t j2,
                                              double t1, double h, std::size_t grid);

}  // namespace mtq

#endif  // MTQ_KFE_HPP
