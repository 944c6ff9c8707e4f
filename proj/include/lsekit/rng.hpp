#pragma once

#include <cstdint>
#include <random>

namespace lsekit {

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the uniform and normal transforms are written
// out here rather than taken from <random> distributions so that a seed
// yields bit-identical draws on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  // Uniform on (0, 1], 53-bit resolution. Never returns 0, so -log(u) is
  // always finite.
  double uniform_open0();

  // Uniform on [0, 1).
  double uniform();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached.
  double normal();

  // Independent child stream. Child seeds depend only on (seed, stream_id),
  // never on how many draws the parent has made, so adding a stream does
  // not perturb existing ones.
  Rng split(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lsekit
