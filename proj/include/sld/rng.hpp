#pragma once

#include <cmath>
#include <cstdint>

namespace sld::rng {

// Counter-based generator: every variate is a pure function of
// (seed, stream, counter), so simulation output is independent of scheduling
// and worker count. Three chained SplitMix64-style finalizer rounds with
// distinct odd multipliers; empirical moment/correlation tests live in
// tests/test_rng.cpp.

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t word(uint64_t seed, uint64_t stream, uint64_t counter) {
  uint64_t z = mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
  z = mix64(z + 0xd1b54a32d192ed03ULL * (counter + 1));
  return mix64(z ^ 0x8cb92ba72f3d8dd7ULL);
}

// Uniform in the open interval (0,1); never returns 0 or 1.
inline double u01(uint64_t seed, uint64_t stream, uint64_t counter) {
  return (static_cast<double>(word(seed, stream, counter) >> 11) + 0.5) * 0x1p-53;
}

// Standard normal via Box-Muller (cosine branch). One variate per counter:
// deterministic consumption, no per-stream state.
inline double normal(uint64_t seed, uint64_t stream, uint64_t counter) {
  const double u1 = u01(seed, stream, 2 * counter);
  const double u2 = u01(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Domain salts keep independent subsystems (integrator noise, initial
// sampling, probe points, bootstrap resampling) on disjoint streams even when
// the user passes the same seed everywhere.
inline constexpr uint64_t kSaltIntegrator = 0x01;
inline constexpr uint64_t kSaltInit = 0x5c6f7d8e9fa0b1c2ULL;
inline constexpr uint64_t kSaltInit2 = 0x7e8f9aabbccdd001ULL;
inline constexpr uint64_t kSaltProbe = 0xa3b5c7d9eb0d1f21ULL;
inline constexpr uint64_t kSaltBootstrap = 0x1234f00ddeadbeefULL;

inline uint64_t salted(uint64_t seed, uint64_t salt) { return mix64(seed ^ salt); }

// Uniform integer in [0, n) by rejection-free scaling (128-bit multiply).
inline uint64_t index(uint64_t seed, uint64_t stream, uint64_t counter, uint64_t n) {
  const unsigned __int128 prod =
      static_cast<unsigned __int128>(word(seed, stream, counter)) * n;
  return static_cast<uint64_t>(prod >> 64);
}

}  // namespace sld::rng
