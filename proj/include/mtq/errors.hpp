#ifndef MTQ_ERRORS_HPP
#define MTQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mtq {

/// Malformed model or weight configuration. Carries the JSON path of the
/// offending field when one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& reason)
      : std::runtime_error(path.empty() ? reason : path + ": " + reason),
        path_(path),
        reason_(reason) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

/// An operation was called outside its domain (reversed interval, level too
/// small, step too large for the stability limit, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not deliver a trustworthy result: unstable
/// integration, a failed ergodicity witness, an uncertifiable target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtq

#endif  // MTQ_ERRORS_HPP
