#ifndef MTQ_MC_HPP
#define MTQ_MC_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "mtq/model.hpp"

namespace mtq {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct SimulationEstimate {
  std::vector<double> eval_times;
  /// state_probs[i][k]: P(X(eval_times[i]) = k); states never visited at
  /// that time are absent.
  std::vector<std::map<State, Estimate>> state_probs;
  std::vector<Estimate> mean;
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
  std::uint64_t candidate_events = 0;  ///< proposals drawn, all paths
  std::uint64_t accepted_events = 0;

  double probability(std::size_t time_index, State k) const;
  Estimate probability_estimate(std::size_t time_index, State k) const;
};

/// Exact simulation by thinning: in state k, candidates arrive at the
/// constant majorant R(k) = sup lambda + min(k, S) sup mu + zeta_k sup xi and
/// are accepted with probability (total rate at tau) / R(k). Path p draws from
/// its own generator seeded with (seed, p), so results do not depend on how
/// paths are scheduled.
SimulationEstimate simulate_estimate(const QueueModel& model, State k0,
                                     const std::vector<double>& eval_times, std::uint64_t paths,
                                     std::uint64_t seed);

}  // namespace mtq

#endif  // MTQ_MC_HPP
