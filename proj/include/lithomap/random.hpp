#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lithomap {

// Portable random stream: MT19937-64 engine with explicit conversions, so a
// given seed yields the same sequence under every standard library (the
// std:: distributions are implementation-defined and are not used here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

  /// Derive an independent seed for a sub-stream (restart, stage, ...).
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lithomap
