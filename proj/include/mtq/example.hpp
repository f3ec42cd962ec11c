#ifndef MTQ_EXAMPLE_HPP
#define MTQ_EXAMPLE_HPP

#include <cstddef>
#include <vector>

#include "mtq/ergo.hpp"
#include "mtq/kfe.hpp"
#include "mtq/model.hpp"
#include "mtq/trunc.hpp"
#include "mtq/weights.hpp"

namespace mtq {

/// S = 10^12, lambda = 1 + sin 2 pi t, mu = 3 + 2 cos 2 pi t,
/// xi = 1 - sin 2 pi t, zeta_k = 1 + 1/k.
QueueModel example_model();

/// mu + xi - lambda, a lower bound for inf_k alpha_k under doubling weights.
DecayFunction example_lower_decay(const QueueModel& model);

struct ExampleConstants {
  double W = 0.0;
  std::uint64_t n = 0;
  double W_n = 0.0;
  double log_W_n = 0.0;
  EssentialBound L;
  Envelope envelope;          ///< fitted to mu + xi - lambda
  EnvelopeCheck envelope_check;
  Envelope alpha_envelope;    ///< fitted to inf_k alpha_k itself
  ErgodicityVerdict verdict;
};

ExampleConstants example_constants(const QueueModel& model, std::uint64_t n = 120);

struct ContractionRow {
  double t = 0.0;
  double l1 = 0.0;            ///< ||p_{e_k}(t) - p_{e_0}(t)||_1 at level n
  double mean_gap = 0.0;      ///< |E(t, k) - E(t, 0)|
  double tv_bound = 0.0;      ///< 4 g_k exp(-int_0^t alpha)
  double lower_form = 0.0;    ///< 2^(k+2) exp(-int_0^t (mu + xi - lambda))
  double simple_form = 0.0;   ///< 2^(k+4) exp(-3 t)
};

struct TruncationRow {
  std::uint64_t n = 0;
  TruncationReport exact;
  double rounded_tv = 0.0;
  double rounded_mean = 0.0;
};

struct ExampleOptions {
  std::uint64_t n = 120;
  double horizon = 7.0;
  double target = 1e-6;
  double settle = 6.0;
  double h = 1e-4;
  double tol = 1e-5;
  std::size_t samples = 101;
  State contrast_state = 5;
};

struct ExampleRun {
  ExampleOptions options;
  ExampleConstants constants;
  TruncationReport certificate;  ///< at (n, horizon, j = 0)
  bool certified = false;
  TruncationChoice min_level;
  std::vector<TruncationRow> truncation_table;
  LimitingRegime limit;
  std::vector<ContractionRow> contraction;
};

ExampleRun run_example(const ExampleOptions& options = {});

}  // namespace mtq

#endif  // MTQ_EXAMPLE_HPP
