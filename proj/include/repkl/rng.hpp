#pragma once

#include <cstdint>
#include <random>

namespace repkl {

/// Deterministic uniform stream used wherever reproducibility across
/// platforms matters (image initialization, verification draws).
///
/// Engine: std::mt19937_64 (standardized, hence portable bit-for-bit).
/// Mapping: each double consumes exactly one 64-bit draw; the top 53 bits
/// form a uniform value in [0, 1). No library distribution objects are
/// used, since their streams are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution, one engine draw.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace repkl
