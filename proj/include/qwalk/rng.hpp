#pragma once

#include <cstdint>
#include <stdexcept>

namespace qwalk::rng {

// splitmix64: tiny, portable, and identical on every platform, unlike the
// implementation-defined distributions in <random>.
struct SplitMix64 {
  std::uint64_t state = 0;

  constexpr explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Stateless stream derivation: one independent stream per
// (seed, replicate, placement-slot) triple.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  SplitMix64 mix(seed);
  std::uint64_t h = mix.next();
  h ^= (a + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  SplitMix64 mix2(h);
  h = mix2.next();
  h ^= (b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  SplitMix64 mix3(h);
  return mix3.next();
}

// Binomial(n, p) as n explicit Bernoulli draws; exact and reproducible.
inline std::int64_t binomial(SplitMix64& g, std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0))
    throw std::domain_error("binomial: need n >= 0 and p in [0, 1]");
  std::int64_t k = 0;
  for (std::int64_t i = 0; i < n; ++i) k += (g.next_double() < p);
  return k;
}

}  // namespace qwalk::rng
