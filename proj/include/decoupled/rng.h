#ifndef DECOUPLED_RNG_H_
#define DECOUPLED_RNG_H_

#include <cstdint>
#include <random>

namespace decoupled {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for stream `stream` (e.g. repetition index) and substream `sub`
// (e.g. 0 = environment, 1 = policy) of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t sub = 0) {
  return mix64(mix64(mix64(seed) ^ stream) ^ (sub * 0xd1b54a32d192ed03ULL));
}

// Thin wrapper over mt19937_64. uniform() converts the top 53 bits itself
// rather than going through std::uniform_real_distribution, whose output is
// implementation-defined, so streams are reproducible across toolchains.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace decoupled

#endif  // DECOUPLED_RNG_H_
