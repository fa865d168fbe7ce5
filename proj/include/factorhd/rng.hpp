#pragma once

#include <cstdint>

namespace factorhd {

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

// SplitMix64 finalizer. Used both as the stream generator and to derive
// independent sub-seeds (per codebook, per batch, per trial).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr Seed derive(Seed parent, std::uint64_t stream) noexcept {
  return Seed{mix64(mix64(parent.value) ^ mix64(stream + 0x632be59bd9b4e019ULL))};
}

// Counter-based generator: output n is mix64(key + n * golden), so a stream is
// fully determined by its seed and the number of draws taken.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RandomStream(Seed seed) noexcept : state_(seed.value) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound) noexcept;

  // UniformRandomBitGenerator interface so <random> distributions work too.
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }
  constexpr std::uint64_t operator()() noexcept { return next(); }

 private:
  std::uint64_t state_;
};

}  // namespace factorhd
