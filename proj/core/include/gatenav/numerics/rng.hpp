#pragma once

#include <cstdint>

namespace gatenav {

// Counter-based deterministic generator (PCG32). A (seed, stream) pair fully
// determines the sample sequence, independent of platform. Substreams for
// parallel work are derived with fork(), which never advances the parent.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  uint32_t next_u32();
  uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  // Uniform in [lo, hi). Degenerate lo == hi returns lo.
  double uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_index(uint64_t n);
  // Standard normal via Box-Muller (pair-cached).
  double normal();

  // Independent substream keyed by idx; deterministic in (seed, stream, idx).
  Rng fork(uint64_t idx) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t state_;
  uint64_t inc_;
  double cached_normal_;
  bool has_cached_normal_;
};

// SplitMix64 finalizer; used for stream derivation and content hashing.
uint64_t mix64(uint64_t x);

}  // namespace gatenav
