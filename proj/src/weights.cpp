#include "mtq/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mtq/errors.hpp"

namespace mtq {

WeightSequence::WeightSequence(Kind kind, std::vector<double> head, double ratio)
    : kind_(kind), head_(std::move(head)), ratio_(ratio) {
  if (head_.empty()) throw PreconditionError("weight table must hold at least d_1");
  double prev = 1.0;  // d_0
  for (double v : head_) {
    if (!std::isfinite(v) || v < prev) {
      throw PreconditionError("weights must be finite and nondecreasing from d_0 = 1");
    }
    prev = v;
  }
  if (!std::isfinite(ratio_) || ratio_ < 1.0) {
    throw PreconditionError("weight tail ratio must be >= 1");
  }
}

WeightSequence WeightSequence::geometric(double ratio, double d1) {
  if (!(ratio > 1.0)) throw PreconditionError("geometric weights need ratio > 1");
  return WeightSequence(Kind::geometric, {d1}, ratio);
}

WeightSequence WeightSequence::doubling() {
  return WeightSequence(Kind::doubling, {1.0}, 2.0);
}

WeightSequence WeightSequence::custom(std::vector<double> head, double tail_ratio) {
  return WeightSequence(Kind::custom, std::move(head), tail_ratio);
}

std::string WeightSequence::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::doubling:
      os << "doubling";
      break;
    case Kind::geometric:
      os << "geometric:" << ratio_ << ":" << head_.front();
      break;
    case Kind::custom:
      os << "custom(head=" << head_.size() << ",tail_ratio=" << ratio_ << ")";
      break;
  }
  return os.str();
}

double WeightSequence::log_d(std::uint64_t i) const {
  if (i == 0) return 0.0;
  const std::uint64_t m = head_.size();
  if (i <= m) return std::log(head_[i - 1]);
  return std::log(head_.back()) + static_cast<double>(i - m) * std::log(ratio_);
}

double WeightSequence::d(std::uint64_t i) const {
  if (i == 0) return 1.0;
  const std::uint64_t m = head_.size();
  if (i <= m) return head_[i - 1];
  return head_.back() * std::pow(ratio_, static_cast<double>(i - m));
}

double WeightSequence::ratio_up(std::uint64_t k) const {
  const std::uint64_t m = head_.size();
  if (k >= m) return ratio_;
  if (k == 0) return head_.front();
  return head_[k] / head_[k - 1];
}

double WeightSequence::ratio_down(std::uint64_t k) const {
  if (k == 0) return 0.0;
  return 1.0 / ratio_up(k - 1);
}

double WeightSequence::g(std::uint64_t i) const {
  const std::uint64_t m = head_.size();
  double sum = 0.0;
  for (std::uint64_t k = 1; k <= std::min(i, m); ++k) sum += head_[k - 1];
  if (i <= m) return sum;
  const double q = static_cast<double>(i - m);
  if (ratio_ == 1.0) return sum + head_.back() * q;
  // d_m * (r + r^2 + ... + r^q)
  // expm1 only matters near r = 1; pow keeps powers of two exact
  const double grow = std::abs(ratio_ - 1.0) < 0.5 ? std::expm1(q * std::log(ratio_))
                                                   : std::pow(ratio_, q) - 1.0;
  return sum + head_.back() * ratio_ * grow / (ratio_ - 1.0);
}

double WeightSequence::W() const {
  const std::uint64_t m = head_.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 1; i <= m; ++i) {
    best = std::min(best, head_[i - 1] / static_cast<double>(i));
  }
  if (ratio_ == 1.0) return 0.0;  // d_m / i -> 0
  // log(d_i / i) is convex in i on the tail with its minimum at 1 / ln r.
  const double centre = 1.0 / std::log(ratio_);
  const double first = static_cast<double>(m + 1);
  for (double i : {first, std::floor(centre), std::ceil(centre)}) {
    if (i < first) continue;
    const double log_value = std::log(head_.back()) + (i - static_cast<double>(m)) * std::log(ratio_) -
                             std::log(i);
    best = std::min(best, std::exp(log_value));
  }
  return best;
}

double WeightSequence::W_n(std::uint64_t n) const { return std::exp(log_W_n(n)); }

double WeightSequence::log_W_n(std::uint64_t n) const {
  if (n == 0) throw PreconditionError("W_n needs n >= 1");
  return log_d(n) - std::log(static_cast<double>(n));
}

WeightSequence parse_weight_spec(const std::string& spec) {
  if (spec == "doubling") return WeightSequence::doubling();
  auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("--weights", "'" + spec + "': " + why);
  };
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw fail("expected a number, got '" + text + "'");
    }
    if (used != text.size()) throw fail("expected a number, got '" + text + "'");
    return v;
  };
  if (spec.rfind("geometric:", 0) == 0) {
    const std::string rest = spec.substr(10);
    const auto colon = rest.find(':');
    try {
      if (colon == std::string::npos) return WeightSequence::powers(number(rest));
      return WeightSequence::geometric(number(rest.substr(0, colon)),
                                       number(rest.substr(colon + 1)));
    } catch (const PreconditionError& e) {
      throw fail(e.what());
    }
  }
  if (spec.rfind("custom:", 0) == 0) {
    const std::string path = spec.substr(7);
    std::ifstream in(path);
    if (!in) throw fail("cannot open " + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("d") || !doc["d"].is_array()) {
      throw ConfigError(path + "#/d", "expected an array of weights d_1, d_2, ...");
    }
    std::vector<double> head;
    for (std::size_t i = 0; i < doc["d"].size(); ++i) {
      if (!doc["d"][i].is_number()) {
        throw ConfigError(path + "#/d/" + std::to_string(i), "expected a number");
      }
      head.push_back(doc["d"][i].get<double>());
    }
    if (!doc.contains("tail_ratio") || !doc["tail_ratio"].is_number()) {
      throw ConfigError(path + "#/tail_ratio", "expected a number");
    }
    try {
      return WeightSequence::custom(std::move(head), doc["tail_ratio"].get<double>());
    } catch (const PreconditionError& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw fail("expected doubling, geometric:R[:D1] or custom:path.json");
}

}  // namespace mtq
