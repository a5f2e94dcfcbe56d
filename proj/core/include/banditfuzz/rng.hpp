#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace banditfuzz {

// Deterministic PRNG used throughout the library. Wraps std::mt19937_64 and
// hand-rolls the draw helpers so that draw sequences depend only on the seed,
// not on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n). n <= 1 returns 0 without consuming a draw.
  std::size_t next_index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  // True with probability p. Always consumes exactly one draw.
  bool chance(double p) { return next_double() < p; }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a stream tag, so
// that consumers (scheduler draws, test generation) cannot perturb each
// other's sequences.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull));
}

}  // namespace banditfuzz
