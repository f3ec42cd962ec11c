#include "mtq/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtq/errors.hpp"

namespace mtq {

namespace {
constexpr double kNegativeTolerance = 1e-12;
constexpr double kSumTolerance = 1e-9;
}  // namespace

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw PreconditionError("probability vector must be non-empty");
  double sum = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p) || p < -kNegativeTolerance) {
      throw PreconditionError("probability entries must be finite and nonnegative, got " +
                              std::to_string(p));
    }
    if (p < 0.0) p = 0.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw PreconditionError("probabilities must sum to 1, got " + std::to_string(sum));
  }
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t n, std::size_t j) {
  if (j > n) throw PreconditionError("point mass state exceeds the truncation level");
  std::vector<double> p(n + 1, 0.0);
  p[j] = 1.0;
  return ProbabilityVector(std::move(p));
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  return ProbabilityVector(std::vector<double>(n + 1, 1.0 / static_cast<double>(n + 1)));
}

double ProbabilityVector::mean() const {
  double m = 0.0;
  for (std::size_t k = 1; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
  return m;
}

double distribution_mean(const ProbabilityVector& p) { return p.mean(); }

double l1_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = k < a.size() ? a[k] : 0.0;
    const double y = k < b.size() ? b[k] : 0.0;
    d += std::abs(x - y);
  }
  return d;
}

}  // namespace mtq
