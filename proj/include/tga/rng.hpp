#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tga {

// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for a named pipeline stage, derived from the global seed.
constexpr std::uint64_t stage_seed(std::uint64_t global, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_seed(global ^ h);
}

// Seed for item `index` of a stream, so results do not depend on which
// thread handles the item.
constexpr std::uint64_t item_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(mix_seed(seed) + index);
}

// Platform-independent draws on top of mt19937_64; the standard
// distributions are implementation-defined and would break byte-identical
// output across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tga
