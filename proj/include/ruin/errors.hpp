#pragma once

#include <stdexcept>
#include <string>

namespace ruin {

/// Argument outside an operation's mathematical domain (negative h, bad parameter).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation is not defined for the requested distribution variant or step form.
class UnsupportedVariant : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A hypothesis of a bound failed on the checked range.
class HypothesisViolated : public std::runtime_error {
 public:
  HypothesisViolated(std::string what, long first_failing_index)
      : std::runtime_error(std::move(what)), index_(first_failing_index) {}

  /// Step index n (or grid index) where the hypothesis first failed; -1 if not indexed.
  long index() const noexcept { return index_; }

 private:
  long index_;
};

/// Search for a certificate exhausted its grid.
class NoCertificate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or schema-invalid configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ruin
