#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace repkl {

struct VerifyOptions {
  std::uint64_t seed = 20260801;
  /// Cross-block leak injected into the kernels of the block-mass
  /// conservation check; nonzero values are a negative control and must
  /// make that check fail.
  double inject_leak = 0.0;
  /// Number of random draws for the sampled checks.
  int draws = 1000;
};

struct CheckResult {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Runs the executable invariant suite: block-mass conservation and
/// conditional evolution, the blockwise KL decomposition identity, KL
/// contraction under a stationary kernel, the one-step inequality against
/// assembled steady mixtures, potential monotonicity and convergence,
/// step-production nonnegativity, potential-drop nonnegativity, and
/// closed-form vs. generic stationary solver agreement.
VerifyReport run_verification(const VerifyOptions& options = {});

}  // namespace repkl
