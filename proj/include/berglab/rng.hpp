#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace berglab {

// Deterministic, platform-independent RNG. Sampling work is split into
// fixed-size chunks; each chunk derives its own stream from (seed, chunk)
// so results do not depend on how many threads execute the chunks.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Stream for chunk `chunk` of a job seeded with `seed`.
  static Rng for_chunk(std::uint64_t seed, std::uint64_t chunk) {
    std::uint64_t sm = seed ^ (0x9e3779b97f4a7c15ull * (chunk + 1));
    return Rng(splitmix64(sm));
  }

  // xoshiro256++
  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard real Gaussian, Box-Muller (one value per call; cache the pair).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Standard complex Gaussian: E|z|^2 = 1.
  std::complex<double> complex_gaussian() {
    const double inv_sqrt2 = 0.70710678118654752440084436210485;
    return {gaussian() * inv_sqrt2, gaussian() * inv_sqrt2};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4] = {};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace berglab
