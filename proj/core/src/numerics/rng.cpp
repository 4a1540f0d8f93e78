#include "gatenav/numerics/rng.hpp"

#include <cmath>

namespace gatenav {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed, uint64_t stream)
    : seed_(seed),
      stream_(stream),
      state_(0),
      inc_((stream << 1u) | 1u),
      cached_normal_(0.0),
      has_cached_normal_(false) {
  next_u32();
  state_ += seed;
  next_u32();
}

uint32_t Rng::next_u32() {
  uint64_t old = state_;
  state_ = old * 6364136223846793005ull + inc_;
  uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
  uint32_t rot = static_cast<uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

uint64_t Rng::next_u64() {
  uint64_t hi = next_u32();
  uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

uint64_t Rng::uniform_index(uint64_t n) {
  // Rejection-free modulo bias is negligible for n << 2^64; keep it simple
  // and deterministic.
  return next_u64() % n;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  // Avoid log(0).
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

Rng Rng::fork(uint64_t idx) const {
  return Rng(seed_, mix64(stream_ * 0x9e3779b97f4a7c15ull + idx + 1));
}

}  // namespace gatenav
