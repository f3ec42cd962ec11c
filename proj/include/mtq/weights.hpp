#ifndef MTQ_WEIGHTS_HPP
#define MTQ_WEIGHTS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mtq {

/// Nondecreasing positive weights d_0 = 1, d_1, d_2, ... given by a finite
/// head table followed by a geometric tail. They define the cumulative
/// weight matrix D of the weighted l1 norm ||z||_{1D} = ||D z||_1.
class WeightSequence {
 public:
  enum class Kind { geometric, doubling, custom };

  /// d_i = d1 * ratio^(i-1) for i >= 1.
  static WeightSequence geometric(double ratio, double d1);
  /// d_i = ratio^i (the weights implied by a catastrophe/service regime with
  /// ratio = 1 + eps).
  static WeightSequence powers(double ratio) { return geometric(ratio, ratio); }
  /// d_0 = 1, d_{k+1} = 2^k.
  static WeightSequence doubling();
  /// head[i] is d_{i+1}; beyond the table d_{m+i} = d_m * tail_ratio^i.
  static WeightSequence custom(std::vector<double> head, double tail_ratio);

  Kind kind() const { return kind_; }
  std::string describe() const;

  double d(std::uint64_t i) const;
  double log_d(std::uint64_t i) const;
  /// d_{k+1} / d_k.
  double ratio_up(std::uint64_t k) const;
  /// d_{k-1} / d_k for k >= 1.
  double ratio_down(std::uint64_t k) const;

  /// g_i = d_1 + ... + d_i (g_0 = 0).
  double g(std::uint64_t i) const;

  /// W = inf_{i >= 1} d_i / i.
  double W() const;
  /// W_n = inf_{k >= n} (d_n + ... + d_k) / k. For a nondecreasing sequence
  /// the infimum sits at k = n, so W_n = d_n / n.
  double W_n(std::uint64_t n) const;
  double log_W_n(std::uint64_t n) const;

  /// Largest index whose ratio to its successor may differ from the tail
  /// ratio; ratio_up(k) == tail_ratio() for k >= head_length().
  std::uint64_t head_length() const { return head_.size(); }
  double tail_ratio() const { return ratio_; }
  const std::vector<double>& head() const { return head_; }

 private:
  WeightSequence(Kind kind, std::vector<double> head, double ratio);

  Kind kind_;
  std::vector<double> head_;  // d_1..d_m, m >= 1
  double ratio_;
};

/// Parses the CLI weight syntax: "doubling", "geometric:R" (d_i = R^i),
/// "geometric:R:D1", "custom:path.json" with {"d": [d1, ...], "tail_ratio": r}.
WeightSequence parse_weight_spec(const std::string& spec);

}  // namespace mtq

#endif  // MTQ_WEIGHTS_HPP
