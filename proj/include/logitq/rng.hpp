#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace logitq {

// SplitMix64 finalizer. Used to derive independent stream seeds from a master
// seed: stream k of master m is seeded with mix64(m + (k + 1) * 0x9E3779B97F4A7C15).
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Seeded random stream. The engine is std::mt19937_64; the real and integer
// mappings are implemented here rather than through <random> distributions so
// that sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Index drawn from unnormalized non-negative weights.
  std::size_t categorical(std::span<const double> weights);

  // Child stream, deterministic in (this stream's seed, stream id).
  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace logitq
