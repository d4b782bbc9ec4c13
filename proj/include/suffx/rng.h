// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_RNG_H_
#define SUFFX_RNG_H_

#include <cstdint>
#include <random>

namespace suffx {

// SplitMix64 finalizer. Used to derive stream seeds; the output sequence is
// part of the reproducibility contract.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for logical stream `stream` of a base seed. All parallel work (sample
// chunks, per-instance sampling) derives its seed this way, so results are
// independent of thread count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL));
}

// Seedable generator with a portable uniform mapping. std::mt19937_64's raw
// output sequence is fixed by the standard; the [0,1) mapping below uses the
// top 53 bits, so identical seeds give bit-identical streams everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  // Uniform in [lo, hi).
  double uniform_range(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  bool coin(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace suffx

#endif  // SUFFX_RNG_H_
