#pragma once

#include <stdexcept>
#include <string>

namespace lot {

// Error taxonomy mirrors the CLI exit-code contract:
//   ConfigError       -> exit 1 (malformed input / config)
//   SolverError       -> exit 2 (numerical failure, non-convergence)
//   PreconditionError -> exit 3 (contract violation on valid input)
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace lot
