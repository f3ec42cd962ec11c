#ifndef MTQ_MODEL_HPP
#define MTQ_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mtq/rate.hpp"

namespace mtq {

using State = std::uint64_t;

/// Dimensionless catastrophe multipliers zeta_k, k >= 1. The catastrophe
/// intensity out of state k is zeta_k * xi(t).
class CatastropheProfile {
 public:
  enum class Kind { constant, one_plus_c_over_k, table_with_tail };

  CatastropheProfile() = default;  // zeta_k = 1

  static CatastropheProfile constant(double c);
  static CatastropheProfile one_plus_c_over_k(double c);
  /// values[i] is zeta_{i+1}; states beyond the table use `tail`.
  static CatastropheProfile table_with_tail(std::vector<double> values, double tail);

  /// zeta_k; 0 for k = 0 (the empty queue has no catastrophe transition).
  double operator()(State k) const;

  double sup() const;
  double inf() const;
  /// inf over k >= first.
  double inf_from(State first) const;
  /// zeta_k is monotone for k >= monotone_from().
  State monotone_from() const;

  Kind kind() const { return kind_; }
  double parameter() const { return c_; }
  const std::vector<double>& table() const { return table_; }
  double tail() const { return tail_; }

 private:
  Kind kind_ = Kind::constant;
  double c_ = 1.0;
  std::vector<double> table_;
  double tail_ = 1.0;
};

/// M_t|M_t|S queue with state-dependent catastrophes:
///   birth  lambda_k(t) = lambda(t)
///   death  mu_k(t)     = min(k, S) mu(t)
///   clear  xi_k(t)     = zeta_k xi(t),  k >= 1.
class QueueModel {
 public:
  QueueModel(std::uint64_t servers, RateExpr lambda, RateExpr mu, RateExpr xi,
             CatastropheProfile zeta);

  std::uint64_t servers() const { return servers_; }
  const RateExpr& lambda() const { return lambda_; }
  const RateExpr& mu() const { return mu_; }
  const RateExpr& xi() const { return xi_; }
  const CatastropheProfile& zeta() const { return zeta_; }

  /// min(k, S) computed on integers.
  std::uint64_t busy_servers(State k) const { return k < servers_ ? k : servers_; }

  /// Common period of lambda, mu and xi (1 for constant models), nullopt when
  /// the rates are not periodic.
  std::optional<double> period() const;

 private:
  std::uint64_t servers_;
  RateExpr lambda_;
  RateExpr mu_;
  RateExpr xi_;
  CatastropheProfile zeta_;
};

struct TransitionRates {
  double birth = 0.0;
  double death = 0.0;
  double catastrophe = 0.0;

  double total() const { return birth + death + catastrophe; }
};

TransitionRates transition_rates(const QueueModel& model, State k, double t);

/// Grid-based sup used for the essential bound and for thinning majorants.
inline constexpr std::size_t kGridPointsPerPeriod = 10000;

struct EssentialBound {
  double value = 0.0;      ///< upper bound on sup_{t,k} |a_kk(t)|
  double grid_max = 0.0;   ///< raw grid maximum, without the Lipschitz slack
  double grid_step = 0.0;
  double horizon = 0.0;
};

/// L >= sup_t [lambda(t) + S mu(t) + sup_k zeta_k xi(t)]. For aperiodic
/// models the sup is taken over [0, aperiodic_horizon].
EssentialBound essential_bound(const QueueModel& model, double aperiodic_horizon = 0.0);

struct RateSups {
  double lambda = 0.0;
  double mu = 0.0;
  double xi = 0.0;
};

/// Upper bounds on sup lambda, sup mu, sup xi over one period, or over
/// [0, horizon] when the model is aperiodic.
RateSups rate_sups(const QueueModel& model, double horizon = 0.0);

/// Transposed intensity matrix of the chain truncated to {0..n}: column j
/// holds the outflows of state j and sums to zero.
struct GeneratorMatrix {
  std::size_t n = 0;
  Eigen::MatrixXd entries;
};

/// Structured view of the truncated chain on {0..n}. The birth transition
/// out of state n is dropped so the generator stays conservative.
class TruncatedChain {
 public:
  TruncatedChain(const QueueModel& model, std::size_t n);

  std::size_t level() const { return n_; }
  const QueueModel& model() const { return *model_; }

  /// out = A_n(t) p.
  void apply(double t, std::span<const double> p, std::span<double> out) const;

  GeneratorMatrix dense(double t) const;

  /// Upper bound on sup_t max_k |a_kk(t)| for this truncation.
  double max_exit_rate() const;

 private:
  const QueueModel* model_;
  std::size_t n_;
  std::vector<double> servers_;  // min(k, S) as double, k = 0..n
  std::vector<double> zeta_;     // zeta_k, k = 0..n
};

GeneratorMatrix truncated_generator(const QueueModel& model, std::size_t n, double t);

/// Finite section B_n(t) of the system obtained by eliminating p_0
/// (row/column i corresponds to state i + 1). The lambda_n outflow of the
/// last state is dropped, consistent with the truncation.
Eigen::MatrixXd reduced_matrix(const QueueModel& model, std::size_t n, double t);

}  // namespace mtq

#endif  // MTQ_MODEL_HPP
