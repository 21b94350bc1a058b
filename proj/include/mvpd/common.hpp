#pragma once

#include <stdexcept>
#include <string>

namespace mvpd {

inline constexpr const char* kVersion = "0.1.0";

/// Per-instance numerical failure (singular matrix, infeasible or degenerate
/// inputs). The Monte Carlo harness records these per sample instead of
/// aborting a sweep; anything else propagates.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Which extremum of the expected return the dual problem targets.
enum class DualBranch { Maximize, Minimize };

}  // namespace mvpd
