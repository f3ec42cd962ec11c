#include "mtq/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mtq/errors.hpp"

namespace mtq {

CatastropheProfile CatastropheProfile::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw PreconditionError("constant catastrophe multiplier must be finite and >= 0");
  }
  CatastropheProfile p;
  p.kind_ = Kind::constant;
  p.c_ = c;
  return p;
}

CatastropheProfile CatastropheProfile::one_plus_c_over_k(double c) {
  if (!(c >= -1.0) || !std::isfinite(c)) {
    throw PreconditionError("one_plus_c_over_k needs c >= -1 so that zeta_1 >= 0");
  }
  CatastropheProfile p;
  p.kind_ = Kind::one_plus_c_over_k;
  p.c_ = c;
  return p;
}

CatastropheProfile CatastropheProfile::table_with_tail(std::vector<double> values,
                                                       double tail) {
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw PreconditionError("catastrophe table entries must be finite and >= 0");
    }
  }
  if (!(tail >= 0.0) || !std::isfinite(tail)) {
    throw PreconditionError("catastrophe tail must be finite and >= 0");
  }
  CatastropheProfile p;
  p.kind_ = Kind::table_with_tail;
  p.table_ = std::move(values);
  p.tail_ = tail;
  return p;
}

double CatastropheProfile::operator()(State k) const {
  if (k == 0) return 0.0;
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::one_plus_c_over_k:
      return 1.0 + c_ / static_cast<double>(k);
    case Kind::table_with_tail:
      return k <= table_.size() ? table_[k - 1] : tail_;
  }
  return 0.0;
}

double CatastropheProfile::sup() const {
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::one_plus_c_over_k:
      return c_ >= 0.0 ? 1.0 + c_ : 1.0;
    case Kind::table_with_tail: {
      double s = tail_;
      for (double v : table_) s = std::max(s, v);
      return s;
    }
  }
  return 0.0;
}

double CatastropheProfile::inf() const { return inf_from(1); }

double CatastropheProfile::inf_from(State first) const {
  first = std::max<State>(first, 1);
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::one_plus_c_over_k:
      return c_ >= 0.0 ? 1.0 : 1.0 + c_ / static_cast<double>(first);
    case Kind::table_with_tail: {
      double s = tail_;
      for (std::size_t k = first; k <= table_.size(); ++k) s = std::min(s, table_[k - 1]);
      return s;
    }
  }
  return 0.0;
}

State CatastropheProfile::monotone_from() const {
  return kind_ == Kind::table_with_tail ? table_.size() + 1 : 1;
}

QueueModel::QueueModel(std::uint64_t servers, RateExpr lambda, RateExpr mu, RateExpr xi,
                       CatastropheProfile zeta)
    : servers_(servers),
      lambda_(std::move(lambda)),
      mu_(std::move(mu)),
      xi_(std::move(xi)),
      zeta_(std::move(zeta)) {
  if (servers_ == 0) throw PreconditionError("number of servers must be positive");
}

std::optional<double> QueueModel::period() const {
  const std::array<const RateExpr*, 3> exprs{&lambda_, &mu_, &xi_};
  return common_period(exprs);
}

TransitionRates transition_rates(const QueueModel& model, State k, double t) {
  TransitionRates r;
  r.birth = model.lambda()(t);
  if (k > 0) {
    r.death = static_cast<double>(model.busy_servers(k)) * model.mu()(t);
    r.catastrophe = model.zeta()(k) * model.xi()(t);
  }
  return r;
}

namespace {

double sup_horizon(const QueueModel& model, double aperiodic_horizon) {
  if (auto p = model.period()) return *p;
  return std::max(aperiodic_horizon, std::max({model.lambda().last_breakpoint(),
                                               model.mu().last_breakpoint(),
                                               model.xi().last_breakpoint()}) + 1.0);
}

}  // namespace

EssentialBound essential_bound(const QueueModel& model, double aperiodic_horizon) {
  const double horizon = sup_horizon(model, aperiodic_horizon);
  const double step = horizon / static_cast<double>(kGridPointsPerPeriod);
  const std::array<double, 3> weights{1.0, static_cast<double>(model.servers()),
                                      model.zeta().sup()};
  const std::array<const RateExpr*, 3> terms{&model.lambda(), &model.mu(), &model.xi()};
  const RateExpr diag = RateExpr::combination(weights, terms);
  const GridExtrema e = diag.grid_extrema(0.0, horizon, step);
  EssentialBound out;
  out.grid_max = e.max;
  out.value = std::max(0.0, e.max + 0.5 * diag.lipschitz() * step);
  if (diag.is_zero()) out.value = 0.0;
  out.grid_step = step;
  out.horizon = horizon;
  return out;
}

RateSups rate_sups(const QueueModel& model, double horizon) {
  const double h = sup_horizon(model, horizon);
  const double step = h / static_cast<double>(kGridPointsPerPeriod);
  auto sup = [&](const RateExpr& e) {
    return e.is_zero() ? 0.0 : std::max(0.0, e.sup_bound(0.0, h, step));
  };
  return {sup(model.lambda()), sup(model.mu()), sup(model.xi())};
}

TruncatedChain::TruncatedChain(const QueueModel& model, std::size_t n)
    : model_(&model), n_(n), servers_(n + 1), zeta_(n + 1) {
  if (n < 1) throw PreconditionError("truncation level n must be >= 1");
  for (std::size_t k = 0; k <= n; ++k) {
    servers_[k] = static_cast<double>(model.busy_servers(k));
    zeta_[k] = model.zeta()(k);
  }
}

void TruncatedChain::apply(double t, std::span<const double> p, std::span<double> out) const {
  const double lam = model_->lambda()(t);
  const double mu = model_->mu()(t);
  const double xi = model_->xi()(t);
  const std::size_t n = n_;

  double cleared = 0.0;
  for (std::size_t k = 1; k <= n; ++k) cleared += zeta_[k] * p[k];

  out[0] = -lam * p[0] + servers_[1] * mu * p[1] + xi * cleared;
  for (std::size_t k = 1; k < n; ++k) {
    out[k] = lam * p[k - 1] - (lam + servers_[k] * mu + zeta_[k] * xi) * p[k] +
             servers_[k + 1] * mu * p[k + 1];
  }
  out[n] = lam * p[n - 1] - (servers_[n] * mu + zeta_[n] * xi) * p[n];
}

GeneratorMatrix TruncatedChain::dense(double t) const {
  const double lam = model_->lambda()(t);
  const double mu = model_->mu()(t);
  const double xi = model_->xi()(t);
  GeneratorMatrix g;
  g.n = n_;
  g.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_ + 1),
                                    static_cast<Eigen::Index>(n_ + 1));
  auto& a = g.entries;
  for (std::size_t j = 0; j <= n_; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (j < n_) a(col + 1, col) += lam;
    if (j > 0) {
      a(col - 1, col) += servers_[j] * mu;
      a(0, col) += zeta_[j] * xi;
    }
  }
  for (Eigen::Index j = 0; j <= static_cast<Eigen::Index>(n_); ++j) {
    double outflow = 0.0;
    for (Eigen::Index i = 0; i <= static_cast<Eigen::Index>(n_); ++i) {
      if (i != j) outflow += a(i, j);
    }
    a(j, j) = -outflow;
  }
  return g;
}

double TruncatedChain::max_exit_rate() const {
  const RateSups sups = rate_sups(*model_);
  double zeta_max = 0.0;
  for (std::size_t k = 1; k <= n_; ++k) zeta_max = std::max(zeta_max, zeta_[k]);
  return sups.lambda + servers_[n_] * sups.mu + zeta_max * sups.xi;
}

GeneratorMatrix truncated_generator(const QueueModel& model, std::size_t n, double t) {
  return TruncatedChain(model, n).dense(t);
}

Eigen::MatrixXd reduced_matrix(const QueueModel& model, std::size_t n, double t) {
  if (n < 2) throw PreconditionError("reduced matrix needs n >= 2");
  const double lam = model.lambda()(t);
  const double mu = model.mu()(t);
  const double xi = model.xi()(t);
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t j = 1; j <= n; ++j) {
    const auto c = static_cast<Eigen::Index>(j - 1);
    const double birth = j < n ? lam : 0.0;
    const double death = static_cast<double>(model.busy_servers(j)) * mu;
    b(c, c) = -(birth + death + model.zeta()(j) * xi);
    if (j >= 2) b(c - 1, c) = death;
    if (j < n) b(c + 1, c) = lam;
  }
  // Eliminating p_0 = 1 - sum p_i couples row 1 to every column via -lambda_0.
  b.row(0).array() -= lam;
  return b;
}

}  // namespace mtq
