#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qpns/stability.hpp"
#include "qpns/torus.hpp"

namespace qpns {

/// One row of the invariant table. `max_violation` is the worst observed value
/// of the check's error measure; a case violates when it exceeds `tolerance`.
struct CheckResult {
  std::string module;
  std::string name;
  int cases = 0;
  int violations = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::string note;

  bool passed() const { return violations == 0; }
};

using LerayFn = std::function<SpaceField(const SpaceField&)>;

struct VerifyInputs {
  ForcingSpec forcing;
  FrequencySpec freq;
  SolverConfig solver;
  SimConfig sim;
  std::uint64_t seed = 1;
  /// Random cases per property check.
  int cases = 20;
  /// Simulated horizon for the trajectory checks (shorter than sim.T).
  double sim_horizon = 6.0;
  /// Projector under test; leray_project when empty.
  LerayFn leray;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  int failures() const;
  const CheckResult* find(const std::string& name) const;
};

VerifyReport run_verify(const VerifyInputs& in);

}  // namespace qpns
