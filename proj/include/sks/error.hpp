#pragma once

#include <stdexcept>
#include <string>

namespace sks {

enum class ErrorKind {
  kValidation,    // malformed input: files, metrics, distributions
  kSizeMismatch,  // configurations with different server counts
  kImbalance,     // fractional masses with different totals
  kInfeasible,    // an operation whose precondition cannot be met
  kDomain,        // argument outside the operation's domain
  kExtraction,    // LP solution violates a plan invariant
  kUnknownScenario,
  kResource,      // oracle state-space budget exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace sks
