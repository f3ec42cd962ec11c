#ifndef MTQ_IO_HPP
#define MTQ_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mtq/ergo.hpp"
#include "mtq/kfe.hpp"
#include "mtq/mc.hpp"
#include "mtq/model.hpp"
#include "mtq/trunc.hpp"

namespace mtq {

using Json = nlohmann::ordered_json;

/// Model document:
///   {"S": 1000000000000 | "1000000000000",
///    "lambda": {"const": 1, "trig": [{"sin": 1, "cos": 0, "freq": 1}],
///               "steps": [{"begin": 0, "end": 1, "level": 0.5}]},
///    "mu": ..., "xi": ...,
///    "zeta": {"kind": "one_plus_c_over_k", "c": 1}}
/// A rate may also be a bare number. Errors are ConfigError with a JSON
/// pointer into `source`.
QueueModel model_from_json(const Json& doc, const std::string& source = "<model>");
QueueModel load_model(const std::string& path);
Json model_to_json(const QueueModel& model);

/// FNV-1a over the compact serialisation.
std::uint64_t model_hash(const QueueModel& model);
std::string hex64(std::uint64_t value);

Json to_json(const ErgodicityVerdict& v);
Json to_json(const Envelope& env);
Json to_json(const BoundReport& report);
Json to_json(const RegimeBound& b);
Json to_json(const TruncationReport& r);
Json to_json(const SimulationEstimate& est);

/// Comment lines written ahead of a CSV body as "# key: value".
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Header t,mean,p0,...,pn; 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Provenance& prov);

/// Two-column CSV "t,<name>" from parallel vectors.
void write_series_csv(std::ostream& out, const std::string& name, const std::vector<double>& t,
                      const std::vector<double>& values, const Provenance& prov);

std::string format_real(double x);

}  // namespace mtq

#endif  // MTQ_IO_HPP
