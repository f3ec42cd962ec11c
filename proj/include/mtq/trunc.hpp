#ifndef MTQ_TRUNC_HPP
#define MTQ_TRUNC_HPP

#include <cstddef>
#include <cstdint>
#include <string>

#include "mtq/ergo.hpp"
#include "mtq/model.hpp"
#include "mtq/weights.hpp"

namespace mtq {

/// Truncation-error bounds for the chain started in e_j:
///   tv   = 8 L t / (n W_n) * (M j d_{j+1} + L M d_1 / a)
///   mean = 3 L (n+1) t / (n W_n) * (same)
/// Evaluated in log-space.
struct TruncationReport {
  std::uint64_t n = 0;
  double t = 0.0;
  State j = 0;
  double tv_bound = 0.0;
  double mean_bound = 0.0;
  double log_tv_bound = 0.0;    ///< -inf when t = 0
  double log_mean_bound = 0.0;
  double L = 0.0;
  double M = 1.0;
  double log_M = 0.0;
  double a = 0.0;
  double W_n = 0.0;
  double log_W_n = 0.0;
  double d1 = 0.0;
  double d_j1 = 0.0;            ///< d_{j+1}
  std::string weights;
};

TruncationReport truncation_bounds(double L, const WeightSequence& w, const Envelope& env,
                                   std::uint64_t n, double t, State j);
/// Same with L taken from essential_bound(model).
TruncationReport truncation_bounds(const QueueModel& model, const WeightSequence& w,
                                   const Envelope& env, std::uint64_t n, double t, State j);

/// Bounds with weights d_k = (1 + eps)^k and the envelope of the regime decay
/// rate. Both envelope strategies are fitted; the smaller certified bound is
/// returned.
TruncationReport regime_truncation_bounds(const QueueModel& model, Regime mode, double eps,
                                  std::uint64_t n, double t, State j);

enum class Criterion { tv, mean, both };

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& name);

inline constexpr std::uint64_t kMaxTruncationLevel = 1000000;

struct TruncationChoice {
  std::uint64_t n = 0;
  TruncationReport report;
};

/// Smallest n with the chosen bound(s) at (t_max, j) <= target, found by
/// doubling from n = 1 and then bisecting. Throws NumericalError when no
/// n <= cap certifies the target.
TruncationChoice min_truncation_level(double L, const WeightSequence& w, const Envelope& env,
                                      double t_max, State j, double target, Criterion criterion,
                                      std::uint64_t cap = kMaxTruncationLevel);
TruncationChoice min_truncation_level(const QueueModel& model, const WeightSequence& w,
                                      const Envelope& env, double t_max, State j, double target,
                                      Criterion criterion, std::uint64_t cap = kMaxTruncationLevel);

/// Rounded closed forms for the worked example (d_{k+1} = 2^k, L ~ 5e12,
/// M <= 4, a = 3), kept for the comparison table:
///   tv   <= t 10^13 / 2^(n-3) (j 2^(j+2) + 10^14)
///   mean <= t (n+1) 10^14 / 2^(n-1) (j 2^(j+2) + 10^14)
double rounded_tv_form(std::uint64_t n, double t, State j);
double rounded_mean_form(std::uint64_t n, double t, State j);

}  // namespace mtq

#endif  // MTQ_TRUNC_HPP
