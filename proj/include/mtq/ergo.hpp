#ifndef MTQ_ERGO_HPP
#define MTQ_ERGO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtq/decay.hpp"
#include "mtq/distribution.hpp"
#include "mtq/model.hpp"
#include "mtq/weights.hpp"

namespace mtq {

inline constexpr std::uint64_t kDefaultKEval = 10000;

/// alpha_k(t) = lambda_k + mu_{k+1} + xi_{k+1}
///              - (d_{k+1}/d_k) lambda_{k+1} - (d_{k-1}/d_k) mu_k.
double alpha_k(const QueueModel& model, const WeightSequence& w, State k, double t);

/// Coefficients of alpha_k on (lambda(t), mu(t), xi(t)).
DecayTerm alpha_term(const QueueModel& model, const WeightSequence& w, State k);

/// alpha(t) = inf_k alpha_k(t) over the candidates k = 0..k_eval plus one
/// term bounding every k > k_eval from below. Beyond the weight head and the
/// catastrophe table, alpha_k is linear in (lambda, mu, xi) with coefficients
/// monotone in k, so the bound uses the smallest service coefficient on the
/// tail and inf_{k > k_eval} zeta_{k+1}.
DecayFunction alpha_decay(const QueueModel& model, const WeightSequence& w,
                          std::uint64_t k_eval = kDefaultKEval);

/// Single-candidate decay c_lambda lambda + c_mu mu + c_xi xi.
DecayFunction linear_decay(const QueueModel& model, double c_lambda, double c_mu, double c_xi,
                           std::string description);

double alpha_inf(const QueueModel& model, const WeightSequence& w, double t,
                 std::uint64_t k_eval = kDefaultKEval);
double alpha_integral(const QueueModel& model, const WeightSequence& w, double s, double t,
                      std::uint64_t k_eval = kDefaultKEval);

struct MinimizerSample {
  double t = 0.0;
  std::int64_t state = -1;  ///< -1 for the k > k_eval tail term
  double alpha = 0.0;
};

struct ErgodicityVerdict {
  enum class Outcome { yes, no, undetermined };

  Outcome outcome = Outcome::undetermined;
  std::string reason;
  std::optional<double> period;
  double period_mean = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  std::vector<MinimizerSample> trace;
};

std::string to_string(ErgodicityVerdict::Outcome outcome);

/// YES when alpha has a positive mean over one period (so its integral
/// diverges); NO otherwise; undetermined for aperiodic rates.
ErgodicityVerdict check_weak_ergodicity(const DecayFunction& alpha);
ErgodicityVerdict check_weak_ergodicity(const QueueModel& model, const WeightSequence& w,
                                        std::uint64_t k_eval = kDefaultKEval);

enum class EnvelopeStrategy {
  period_mean,      ///< a = mean of alpha over a period, M from its oscillation
  uniform_minimum,  ///< a = min of alpha, M = 1 (needs alpha > 0 everywhere)
};

/// exp(-int_s^t alpha) <= M exp(-a (t - s)) for all 0 <= s <= t.
struct Envelope {
  double M = 1.0;
  double a = 0.0;
  double log_M = 0.0;
  EnvelopeStrategy strategy = EnvelopeStrategy::period_mean;
  std::string alpha_description;
};

Envelope fit_envelope(const DecayFunction& alpha, double period,
                      EnvelopeStrategy strategy = EnvelopeStrategy::period_mean);
Envelope fit_envelope(const QueueModel& model, const WeightSequence& w, double period,
                      std::uint64_t k_eval = kDefaultKEval);

struct EnvelopeCheck {
  bool ok = false;
  double worst_log_excess = 0.0;  ///< max over pairs of log(lhs / rhs)
  std::size_t pairs = 0;
};

/// Checks the envelope inequality on a grid x grid set of (s, t) pairs
/// spanning two periods, with relative slack.
EnvelopeCheck verify_envelope(const DecayFunction& alpha, const Envelope& env, double period,
                              std::size_t grid = 50, double slack = 1e-9);

/// 4 exp(-int_s^t alpha) sum_{i>=1} g_i |p1_i - p2_i|.
double tv_distance_bound(const DecayFunction& alpha, const WeightSequence& w, double s, double t,
                         const ProbabilityVector& p1, const ProbabilityVector& p2);
double tv_distance_bound(const QueueModel& model, const WeightSequence& w, double s, double t,
                         const ProbabilityVector& p1, const ProbabilityVector& p2,
                         std::uint64_t k_eval = kDefaultKEval);

/// (4 / W) g_k exp(-int_0^t alpha): distance of E(t, k) from the limiting
/// mean anchored at the empty queue. Throws NumericalError when W = 0.
double limiting_mean_bound(const DecayFunction& alpha, const WeightSequence& w, double t, State k);
double limiting_mean_bound(const QueueModel& model, const WeightSequence& w, double t, State k,
                           std::uint64_t k_eval = kDefaultKEval);

enum class Regime { catastrophe, service };

std::string to_string(Regime mode);
Regime parse_regime(const std::string& name);

/// The regime decay rate:
///   catastrophe: zeta xi(t) - eps lambda(t),  zeta = inf_k zeta_k
///   service:     eps / (1 + eps) (S mu(t) - (1 + eps) lambda(t)).
DecayFunction regime_decay(const QueueModel& model, Regime mode, double eps);

/// Throws PreconditionError naming the failed integral condition.
void check_regime(const QueueModel& model, Regime mode, double eps);

struct RegimeBound {
  Regime mode = Regime::catastrophe;
  double eps = 0.0;
  double t = 0.0;
  State k = 0;
  double tv_bound = 0.0;
  double mean_bound = 0.0;
  double W = 0.0;          ///< W of the weights d_k = (1 + eps)^k
  double exponent = 0.0;   ///< int_0^t of the regime decay rate
  std::string note;
};

/// 4 (1+eps)^k / eps exp(-int_0^t alpha_*) and the same divided by W.
RegimeBound regime_bounds(const QueueModel& model, Regime mode, double eps, double t, State k);

struct EpsilonChoice {
  double eps = 0.0;
  RegimeBound bound;
  std::size_t feasible = 0;  ///< grid points satisfying the regime condition
};

/// Sweeps eps over a log grid in [eps_min, eps_max] and returns the eps with
/// the smallest tv bound at (t, k). Throws PreconditionError when no grid
/// point satisfies the regime condition.
EpsilonChoice sweep_epsilon(const QueueModel& model, Regime mode, double t, State k,
                            std::size_t points = 64, double eps_min = 1e-3, double eps_max = 10.0);

struct LogNormOracle {
  double gamma = 0.0;
  /// per_column[c] = c_cc + sum_{i != c} |c_ic| for column c of D B D^{-1};
  /// column c corresponds to state c + 1.
  std::vector<double> per_column;
};

/// l1 logarithmic norm of D_n B_n(t) D_n^{-1}, formed with triangular solves.
LogNormOracle lognorm_oracle(const QueueModel& model, const WeightSequence& w, std::size_t n,
                             double t);

struct BoundRow {
  double t = 0.0;
  State k = 0;
  double tv_bound = 0.0;
  std::optional<double> mean_bound;
};

struct BoundReport {
  ErgodicityVerdict verdict;
  std::string weights;
  double W = 0.0;
  std::optional<Envelope> envelope;
  std::vector<BoundRow> rows;
};

/// Evaluates the weighted-norm bounds from e_k against the e_0 anchor for
/// every (t, k) pair.
BoundReport bound_report(const QueueModel& model, const WeightSequence& w,
                         const std::vector<double>& times, const std::vector<State>& states,
                         std::uint64_t k_eval = kDefaultKEval);

}  // namespace mtq

#endif  // MTQ_ERGO_HPP
