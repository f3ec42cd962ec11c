#include "mtq/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "mtq/errors.hpp"

namespace mtq {

namespace {

double number_at(const Json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path, "expected a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double field(const Json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number_at(obj[key], path + "/" + key);
}

double required(const Json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + "/" + key, "missing");
  return number_at(obj[key], path + "/" + key);
}

RateExpr rate_from_json(const Json& node, const std::string& path) {
  if (node.is_number()) {
    try {
      return RateExpr(number_at(node, path));
    } catch (const PreconditionError& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (!node.is_object()) throw ConfigError(path, "expected a number or a rate object");
  for (const auto& [key, value] : node.items()) {
    if (key != "const" && key != "trig" && key != "steps") {
      throw ConfigError(path + "/" + key, "unknown rate field");
    }
  }
  const double c = field(node, "const", path, 0.0);
  std::vector<TrigTerm> trig;
  if (node.contains("trig")) {
    const Json& list = node["trig"];
    if (!list.is_array()) throw ConfigError(path + "/trig", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + "/trig/" + std::to_string(i);
      if (!list[i].is_object()) throw ConfigError(p, "expected {\"sin\", \"cos\", \"freq\"}");
      TrigTerm term{field(list[i], "sin", p, 0.0), field(list[i], "cos", p, 0.0),
                    field(list[i], "freq", p, 1.0)};
      if (!(term.freq > 0.0)) throw ConfigError(p + "/freq", "frequency must be positive");
      trig.push_back(term);
    }
  }
  std::vector<StepTerm> steps;
  if (node.contains("steps")) {
    const Json& list = node["steps"];
    if (!list.is_array()) throw ConfigError(path + "/steps", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + "/steps/" + std::to_string(i);
      if (!list[i].is_object()) throw ConfigError(p, "expected {\"begin\", \"end\", \"level\"}");
      StepTerm term{required(list[i], "begin", p), required(list[i], "end", p),
                    required(list[i], "level", p)};
      if (!(term.end > term.begin)) throw ConfigError(p, "step window needs begin < end");
      steps.push_back(term);
    }
  }
  try {
    return RateExpr(c, std::move(trig), std::move(steps));
  } catch (const PreconditionError& e) {
    throw ConfigError(path, e.what());
  }
}

std::uint64_t servers_from_json(const Json& node, const std::string& path) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (node.is_number_integer()) {
    const auto v = node.get<std::int64_t>();
    if (v <= 0) throw ConfigError(path, "S must be a positive integer");
    return static_cast<std::uint64_t>(v);
  }
  if (node.is_number_float()) {
    const double v = node.get<double>();
    if (v >= 1.0 && v < 0x1.0p64 && std::floor(v) == v) return static_cast<std::uint64_t>(v);
    throw ConfigError(path, "S must be a positive integer");
  }
  if (node.is_string()) {
    const std::string text = node.get<std::string>();
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError(path, "S must be a string of decimal digits");
    }
    std::uint64_t v = 0;
    for (char ch : text) {
      const auto digit = static_cast<std::uint64_t>(ch - '0');
      if (v > (UINT64_MAX - digit) / 10) throw ConfigError(path, "S does not fit in 64 bits");
      v = v * 10 + digit;
    }
    return v;
  }
  throw ConfigError(path, "S must be an integer or a decimal string");
}

CatastropheProfile zeta_from_json(const Json& node, const std::string& path) {
  if (node.is_number()) {
    try {
      return CatastropheProfile::constant(number_at(node, path));
    } catch (const PreconditionError& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (!node.is_object() || !node.contains("kind") || !node["kind"].is_string()) {
    throw ConfigError(path + "/kind", "expected constant, one_plus_c_over_k or table_with_tail");
  }
  const std::string kind = node["kind"].get<std::string>();
  try {
    if (kind == "constant") return CatastropheProfile::constant(required(node, "c", path));
    if (kind == "one_plus_c_over_k") {
      return CatastropheProfile::one_plus_c_over_k(required(node, "c", path));
    }
    if (kind == "table_with_tail") {
      if (!node.contains("values") || !node["values"].is_array()) {
        throw ConfigError(path + "/values", "expected an array");
      }
      std::vector<double> values;
      for (std::size_t i = 0; i < node["values"].size(); ++i) {
        values.push_back(number_at(node["values"][i], path + "/values/" + std::to_string(i)));
      }
      return CatastropheProfile::table_with_tail(std::move(values), required(node, "tail", path));
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + "/kind", "unknown catastrophe profile '" + kind + "'");
}

Json rate_to_json(const RateExpr& e) {
  Json out;
  out["const"] = e.constant_term();
  if (!e.trig_terms().empty()) {
    Json list = Json::array();
    for (const TrigTerm& t : e.trig_terms()) {
      list.push_back({{"sin", t.sin_amp}, {"cos", t.cos_amp}, {"freq", t.freq}});
    }
    out["trig"] = std::move(list);
  }
  if (!e.step_terms().empty()) {
    Json list = Json::array();
    for (const StepTerm& s : e.step_terms()) {
      list.push_back({{"begin", s.begin}, {"end", s.end}, {"level", s.level}});
    }
    out["steps"] = std::move(list);
  }
  return out;
}

Json zeta_to_json(const CatastropheProfile& z) {
  switch (z.kind()) {
    case CatastropheProfile::Kind::constant:
      return {{"kind", "constant"}, {"c", z.parameter()}};
    case CatastropheProfile::Kind::one_plus_c_over_k:
      return {{"kind", "one_plus_c_over_k"}, {"c", z.parameter()}};
    case CatastropheProfile::Kind::table_with_tail:
      return {{"kind", "table_with_tail"}, {"values", z.table()}, {"tail", z.tail()}};
  }
  return {};
}

Json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

QueueModel model_from_json(const Json& doc, const std::string& source) {
  const std::string root = source + "#";
  if (!doc.is_object()) throw ConfigError(root, "expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "S" && key != "lambda" && key != "mu" && key != "xi" && key != "zeta" &&
        key != "name") {
      throw ConfigError(root + "/" + key, "unknown model field");
    }
  }
  if (!doc.contains("S")) throw ConfigError(root + "/S", "missing");
  const std::uint64_t servers = servers_from_json(doc["S"], root + "/S");
  if (servers == 0) throw ConfigError(root + "/S", "S must be a positive integer");
  auto rate = [&](const char* key) {
    if (!doc.contains(key)) throw ConfigError(root + "/" + key, "missing");
    return rate_from_json(doc[key], root + "/" + key);
  };
  RateExpr lambda = rate("lambda");
  RateExpr mu = rate("mu");
  RateExpr xi = rate("xi");
  CatastropheProfile zeta =
      doc.contains("zeta") ? zeta_from_json(doc["zeta"], root + "/zeta") : CatastropheProfile();
  try {
    return QueueModel(servers, std::move(lambda), std::move(mu), std::move(xi), std::move(zeta));
  } catch (const PreconditionError& e) {
    throw ConfigError(root, e.what());
  }
}

QueueModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open model file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return model_from_json(doc, path);
}

Json model_to_json(const QueueModel& model) {
  Json out;
  out["S"] = model.servers();
  out["lambda"] = rate_to_json(model.lambda());
  out["mu"] = rate_to_json(model.mu());
  out["xi"] = rate_to_json(model.xi());
  out["zeta"] = zeta_to_json(model.zeta());
  return out;
}

std::uint64_t model_hash(const QueueModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : model_to_json(model).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

Json to_json(const ErgodicityVerdict& v) {
  Json out;
  out["weakly_ergodic"] = to_string(v.outcome);
  out["reason"] = v.reason;
  out["period"] = v.period ? Json(*v.period) : Json(nullptr);
  if (v.period) {
    out["alpha_period_mean"] = v.period_mean;
    out["alpha_min"] = v.alpha_min;
    out["alpha_max"] = v.alpha_max;
    Json trace = Json::array();
    for (const MinimizerSample& s : v.trace) {
      trace.push_back({{"t", s.t}, {"argmin_k", s.state}, {"alpha", s.alpha}});
    }
    out["minimizer_trace"] = std::move(trace);
  }
  return out;
}

Json to_json(const Envelope& env) {
  return {{"M", real(env.M)},
          {"log_M", env.log_M},
          {"a", env.a},
          {"strategy", env.strategy == EnvelopeStrategy::period_mean ? "period_mean"
                                                                      : "uniform_minimum"},
          {"alpha", env.alpha_description}};
}

Json to_json(const BoundReport& report) {
  Json out;
  out["verdict"] = to_json(report.verdict);
  out["weights"] = report.weights;
  out["W"] = report.W;
  out["envelope"] = report.envelope ? to_json(*report.envelope) : Json(nullptr);
  Json rows = Json::array();
  for (const BoundRow& r : report.rows) {
    rows.push_back({{"t", r.t},
                    {"k", r.k},
                    {"tv_bound", real(r.tv_bound)},
                    {"mean_bound", r.mean_bound ? real(*r.mean_bound) : Json(nullptr)}});
  }
  out["rows"] = std::move(rows);
  return out;
}

Json to_json(const RegimeBound& b) {
  Json out{{"mode", to_string(b.mode)}, {"eps", b.eps},         {"t", b.t},
           {"k", b.k},                  {"tv_bound", real(b.tv_bound)},
           {"mean_bound", real(b.mean_bound)}, {"W", b.W},      {"exponent", b.exponent}};
  if (!b.note.empty()) out["note"] = b.note;
  return out;
}

Json to_json(const TruncationReport& r) {
  return {{"n", r.n},
          {"t", r.t},
          {"j", r.j},
          {"tv_bound", real(r.tv_bound)},
          {"mean_bound", real(r.mean_bound)},
          {"log_tv_bound", real(r.log_tv_bound)},
          {"log_mean_bound", real(r.log_mean_bound)},
          {"L", r.L},
          {"M", real(r.M)},
          {"log_M", r.log_M},
          {"a", r.a},
          {"W_n", real(r.W_n)},
          {"log_W_n", r.log_W_n},
          {"d1", r.d1},
          {"d_j_plus_1", real(r.d_j1)},
          {"weights", r.weights}};
}

Json to_json(const SimulationEstimate& est) {
  Json out;
  out["paths"] = est.paths;
  out["seed"] = est.seed;
  out["candidate_events"] = est.candidate_events;
  out["accepted_events"] = est.accepted_events;
  Json rows = Json::array();
  for (std::size_t i = 0; i < est.eval_times.size(); ++i) {
    Json probs = Json::object();
    for (const auto& [k, e] : est.state_probs[i]) {
      probs[std::to_string(k)] = {{"p", e.value}, {"se", e.se}};
    }
    rows.push_back({{"t", est.eval_times[i]},
                    {"mean", {{"value", est.mean[i].value}, {"se", est.mean[i].se}}},
                    {"state_probs", std::move(probs)}});
  }
  out["estimates"] = std::move(rows);
  return out;
}

namespace {

void write_provenance(std::ostream& out, const Provenance& prov) {
  for (const auto& [key, value] : prov) out << "# " << key << ": " << value << '\n';
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Provenance& prov) {
  write_provenance(out, prov);
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().level();
  out << "t,mean";
  for (std::size_t k = 0; k <= n; ++k) out << ",p" << k;
  out << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::string line = format_real(traj.times[i]) + "," + format_real(traj.means[i]);
    for (double p : traj.states[i].probs()) {
      line += ',';
      line += format_real(p);
    }
    out << line << '\n';
  }
}

void write_series_csv(std::ostream& out, const std::string& name, const std::vector<double>& t,
                      const std::vector<double>& values, const Provenance& prov) {
  write_provenance(out, prov);
  out << "t," << name << '\n';
  for (std::size_t i = 0; i < t.size() && i < values.size(); ++i) {
    out << format_real(t[i]) << ',' << format_real(values[i]) << '\n';
  }
}

}  // namespace mtq
