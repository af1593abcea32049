#ifndef EDA_RNG_HPP
#define EDA_RNG_HPP

#include <cstdint>
#include <random>

namespace eda {

// Mixes a base seed with a stream index (splitmix64 finalizer). Replicate
// chains and experiment cells get their streams from here.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Thin wrapper around mt19937_64. The std distributions are not portable
// across standard libraries, so the draws used by the simulators are
// implemented here directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace eda

#endif  // EDA_RNG_HPP
