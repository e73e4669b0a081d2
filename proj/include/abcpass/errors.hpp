#pragma once

#include <stdexcept>
#include <string>

namespace abcpass {

/// Violated precondition or broken internal invariant (a bug in the caller).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Invalid or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure during an otherwise valid run (CLI exit code 3).
class RunError : public std::runtime_error {
 public:
  explicit RunError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by a simulator for a transient failure; the sampler retries with a fresh seed.
class SimulationFailure : public std::runtime_error {
 public:
  explicit SimulationFailure(const std::string& what) : std::runtime_error(what) {}
};

inline void contract_check(bool ok, const std::string& msg) {
  if (!ok) throw ContractError(msg);
}

}  // namespace abcpass
