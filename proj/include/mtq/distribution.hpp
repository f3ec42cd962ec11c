#ifndef MTQ_DISTRIBUTION_HPP
#define MTQ_DISTRIBUTION_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace mtq {

/// Distribution over {0..n}. Entries down to -1e-12 are accepted as rounding
/// noise and clipped to 0; the total must be 1 within 1e-9.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> probs);

  static ProbabilityVector point_mass(std::size_t n, std::size_t j);
  static ProbabilityVector uniform(std::size_t n);

  std::size_t level() const { return probs_.size() - 1; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::span<const double> probs() const { return probs_; }

  double mean() const;

 private:
  std::vector<double> probs_;
};

double distribution_mean(const ProbabilityVector& p);

/// ||a - b||_1, treating the shorter vector as zero-padded.
double l1_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mtq

#endif  // MTQ_DISTRIBUTION_HPP
