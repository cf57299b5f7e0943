#pragma once

#include <cmath>
#include <cstdint>

namespace pairrank {

// splitmix64; used directly as the project RNG so that streams are
// reproducible independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  uint64_t next_below(uint64_t n) {
    // rejection-free modulo is fine here; n is tiny relative to 2^64
    return next_u64() % n;
  }

  bool next_bool() { return (next_u64() >> 63) != 0; }

  // standard normal via Box-Muller (no caching; deterministic stream)
  double next_gaussian() {
    double u = 0.0;
    while (u <= 0.0) u = next_double();
    double v = next_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
  }

 private:
  uint64_t state_;
};

// Deterministic seed derivation for sub-streams (EM iterations, rounds, ...).
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return r.next_u64();
}

}  // namespace pairrank
