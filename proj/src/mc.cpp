#include "mtq/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mtq/errors.hpp"

namespace mtq {

double SimulationEstimate::probability(std::size_t time_index, State k) const {
  return probability_estimate(time_index, k).value;
}

Estimate SimulationEstimate::probability_estimate(std::size_t time_index, State k) const {
  const auto& row = state_probs.at(time_index);
  const auto it = row.find(k);
  return it == row.end() ? Estimate{} : it->second;
}

namespace {

class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    engine_.seed(seq);
  }

  // Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

struct Tally {
  std::map<State, std::uint64_t> counts;
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;
};

}  // namespace

SimulationEstimate simulate_estimate(const QueueModel& model, State k0,
                                     const std::vector<double>& eval_times, std::uint64_t paths,
                                     std::uint64_t seed) {
  if (paths < 1) throw PreconditionError("paths must be >= 1");
  if (eval_times.empty()) throw PreconditionError("need at least one evaluation time");
  for (std::size_t i = 0; i < eval_times.size(); ++i) {
    if (!(eval_times[i] >= 0.0) || !std::isfinite(eval_times[i])) {
      throw PreconditionError("evaluation times must be finite and >= 0");
    }
    if (i > 0 && !(eval_times[i] > eval_times[i - 1])) {
      throw PreconditionError("evaluation times must be increasing");
    }
  }
  const double horizon = eval_times.back();
  const RateSups sups = rate_sups(model, horizon);
  auto majorant = [&](State k) {
    return sups.lambda + static_cast<double>(model.busy_servers(k)) * sups.mu +
           model.zeta()(k) * sups.xi;
  };

  std::vector<Tally> tallies(eval_times.size());
  SimulationEstimate est;
  for (std::uint64_t path = 0; path < paths; ++path) {
    PathStream rng(seed, path);
    State k = k0;
    double t = 0.0;
    std::size_t next = 0;
    auto record_until = [&](double tau) {
      while (next < eval_times.size() && eval_times[next] < tau) {
        Tally& tally = tallies[next];
        ++tally.counts[k];
        tally.sum += k;
        tally.sum_sq += static_cast<unsigned __int128>(k) * k;
        ++next;
      }
    };
    while (next < eval_times.size()) {
      const double rate = majorant(k);
      if (!(rate > 0.0)) {
        record_until(std::numeric_limits<double>::infinity());
        break;
      }
      const double tau = t + rng.exponential(rate);
      record_until(tau);
      if (next == eval_times.size()) break;
      t = tau;
      ++est.candidate_events;
      const TransitionRates r = transition_rates(model, k, t);
      const double u = rng.uniform() * rate;
      if (u >= r.total()) continue;
      ++est.accepted_events;
      if (u < r.birth) {
        ++k;
      } else if (u < r.birth + r.death) {
        --k;
      } else {
        k = 0;
      }
    }
  }

  est.eval_times = eval_times;
  est.paths = paths;
  est.seed = seed;
  const double n = static_cast<double>(paths);
  for (const Tally& tally : tallies) {
    std::map<State, Estimate> row;
    for (const auto& [state, count] : tally.counts) {
      const double p = static_cast<double>(count) / n;
      row[state] = {p, std::sqrt(p * (1.0 - p) / n)};
    }
    est.state_probs.push_back(std::move(row));
    const double mean = static_cast<double>(tally.sum) / n;
    double var = static_cast<double>(tally.sum_sq) / n - mean * mean;
    if (paths > 1) var *= n / (n - 1.0);
    est.mean.push_back({mean, std::sqrt(std::max(0.0, var) / n)});
  }
  return est;
}

}  // namespace mtq
