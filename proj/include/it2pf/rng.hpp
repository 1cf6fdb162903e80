#pragma once

#include <cstdint>
#include <random>

namespace it2pf {

/// SplitMix64 finalizer. Used to derive independent substreams from (seed, stream id).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seeded PRNG with a platform-independent output sequence.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard. The
/// library distributions (normal_distribution etc.) are implementation-defined,
/// so uniform and Gaussian draws are computed here from raw engine output.
/// Substream `id` of seed `s` is seeded with splitmix64(s ^ splitmix64(id + 1)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t id);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (both variates used).
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace it2pf
