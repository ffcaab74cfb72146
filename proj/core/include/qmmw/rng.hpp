#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace qmmw {

/// Seeded 64-bit Mersenne Twister with platform-independent derived draws.
///
/// The standard library distributions are implementation-defined, so the
/// variates used by the simulator are derived from raw engine output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, n); unbiased by rejection. Requires n > 0.
  std::size_t index(std::size_t n);
  /// +1 or -1 with equal probability.
  int rademacher();
  /// Standard normal (Box-Muller, one variate per call, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` derived from a base seed; distinct indices give
/// decorrelated engines without coordination between workers.
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t index);

}  // namespace qmmw
