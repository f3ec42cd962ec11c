#include "mtq/decay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "mtq/errors.hpp"

namespace mtq {

DecayFunction::DecayFunction(const QueueModel& model, std::vector<DecayTerm> terms,
                             std::string description)
    : lambda_(model.lambda()),
      mu_(model.mu()),
      xi_(model.xi()),
      terms_(std::move(terms)),
      description_(std::move(description)),
      period_(model.period()) {
  if (terms_.empty()) throw PreconditionError("decay function needs at least one candidate");
  if (period_) {
    table_ = segments(0.0, *period_, 1000);
    prefix_.reserve(table_.size());
    double running = 0.0;
    for (const DecaySegment& seg : table_) {
      prefix_.push_back(running);
      running += term_integral(seg.term, seg.begin, seg.end);
    }
    period_integral_ = running;
  }
}

namespace {

// Index of the table segment containing u in [0, period].
std::size_t locate(const std::vector<DecaySegment>& table, double u) {
  auto it = std::upper_bound(table.begin(), table.end(), u,
                             [](double x, const DecaySegment& seg) { return x < seg.begin; });
  return it == table.begin() ? 0 : static_cast<std::size_t>(it - table.begin()) - 1;
}

}  // namespace

double DecayFunction::cumulative(double u) const {
  if (!period_) return u >= 0.0 ? integral(0.0, u, 1000) : -integral(u, 0.0, 1000);
  const double cycles = std::floor(u / *period_);
  const double local = std::clamp(u - cycles * *period_, 0.0, *period_);
  const std::size_t j = locate(table_, local);
  const DecaySegment& seg = table_[j];
  return cycles * period_integral_ + prefix_[j] + term_integral(seg.term, seg.begin, local);
}

double DecayFunction::fast_value(double u) const {
  if (!period_) return (*this)(u);
  const double cycles = std::floor(u / *period_);
  const double local = std::clamp(u - cycles * *period_, 0.0, *period_);
  return term_value(table_[locate(table_, local)].term, u);
}

double DecayFunction::operator()(double t) const {
  return term_value(argmin(t), t);
}

std::size_t DecayFunction::argmin(double t) const {
  const double lam = lambda_(t);
  const double mu = mu_(t);
  const double xi = xi_(t);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const DecayTerm& c = terms_[i];
    const double v = c.c_lambda * lam + c.c_mu * mu + c.c_xi * xi;
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

double DecayFunction::term_value(std::size_t i, double t) const {
  const DecayTerm& c = terms_.at(i);
  return c.c_lambda * lambda_(t) + c.c_mu * mu_(t) + c.c_xi * xi_(t);
}

double DecayFunction::term_integral(std::size_t i, double s, double t) const {
  const DecayTerm& c = terms_.at(i);
  double value = 0.0;
  if (c.c_lambda != 0.0) value += c.c_lambda * lambda_.integral(s, t);
  if (c.c_mu != 0.0) value += c.c_mu * mu_.integral(s, t);
  if (c.c_xi != 0.0) value += c.c_xi * xi_.integral(s, t);
  return value;
}

void DecayFunction::split(double l, double r, std::size_t a, std::size_t b,
                          std::vector<DecaySegment>& out) const {
  auto push = [&out](double begin, double end, std::size_t term) {
    if (end <= begin) return;
    if (!out.empty() && out.back().term == term && out.back().end == begin) {
      out.back().end = end;
    } else {
      out.push_back({begin, end, term});
    }
  };
  if (a == b) {
    push(l, r, a);
    return;
  }
  const double mid = 0.5 * (l + r);
  if (r - l <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(r)) ||
      mid <= l || mid >= r) {
    push(l, mid, a);
    push(mid, r, b);
    return;
  }
  const std::size_t m = argmin(mid);
  split(l, mid, a, m, out);
  split(mid, r, m, b, out);
}

std::vector<DecaySegment> DecayFunction::segments(double s, double t,
                                                  std::size_t samples) const {
  if (s > t) throw PreconditionError("integration interval is reversed (s > t)");
  std::vector<DecaySegment> out;
  if (s == t) return out;
  if (terms_.size() == 1) {
    out.push_back({s, t, 0});
    return out;
  }
  samples = std::max<std::size_t>(samples, 1);
  double prev_t = s;
  std::size_t prev_arg = argmin(s);
  for (std::size_t i = 1; i <= samples; ++i) {
    const double tau = (i == samples) ? t : s + (t - s) * static_cast<double>(i) / static_cast<double>(samples);
    const std::size_t arg = argmin(tau);
    split(prev_t, tau, prev_arg, arg, out);
    prev_t = tau;
    prev_arg = arg;
  }
  return out;
}

double DecayFunction::integral(double s, double t, std::size_t samples) const {
  double total = 0.0;
  for (const DecaySegment& seg : segments(s, t, samples)) {
    total += term_integral(seg.term, seg.begin, seg.end);
  }
  return total;
}

double DecayFunction::integral(double s, double t) const {
  if (s > t) throw PreconditionError("integration interval is reversed (s > t)");
  if (s == t) return 0.0;
  if (period_) return cumulative(t) - cumulative(s);
  return integral(s, t, 1000);
}

double DecayFunction::integral_quadrature(double s, double t, double abs_tol) const {
  if (s > t) throw PreconditionError("integration interval is reversed (s > t)");
  if (s == t) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto f = [this](double tau) { return (*this)(tau); };
  // One panel per unit of time keeps the kinks of the minimum local.
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(t - s)));
  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double a = s + (t - s) * static_cast<double>(i) / static_cast<double>(panels);
    const double b = (i + 1 == panels) ? t : s + (t - s) * static_cast<double>(i + 1) / static_cast<double>(panels);
    double error = 0.0;
    double l1 = 0.0;
    gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &error, &l1);
    const double rel_tol = std::min(1e-6, abs_tol / static_cast<double>(panels) / std::max(1.0, l1));
    total += gauss_kronrod<double, 31>::integrate(f, a, b, 30, rel_tol, &error);
  }
  return total;
}

double DecayFunction::period_mean() const {
  if (!period_) throw PreconditionError("decay function is not periodic");
  return period_integral_ / *period_;
}

double DecayFunction::minimum(double t0, double t1, std::size_t grid) const {
  if (!(t1 >= t0)) throw PreconditionError("minimum needs t0 <= t1");
  grid = std::max<std::size_t>(grid, 1);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  const double h = (t1 - t0) / static_cast<double>(grid);
  for (std::size_t i = 0; i <= grid; ++i) {
    const double v = fast_value(t0 + h * static_cast<double>(i));
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  if (h > 0.0) {
    const double lo = std::max(t0, t0 + h * (static_cast<double>(best_i) - 1.0));
    const double hi = std::min(t1, t0 + h * (static_cast<double>(best_i) + 1.0));
    auto f = [this](double tau) { return (*this)(tau); };
    const auto refined = boost::math::tools::brent_find_minima(f, lo, hi, 52);
    best = std::min(best, refined.second);
  }
  return best - 1e-9 * std::max(1.0, std::abs(best));
}

}  // namespace mtq
