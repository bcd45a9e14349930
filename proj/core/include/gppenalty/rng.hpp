#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gppen {

// One step of the splitmix64 generator; used as a seed mixer.
std::uint64_t splitmix64(std::uint64_t x);

// Derive a well-separated seed for a sub-stream identified by a tag chain,
// e.g. derive_seed(seed, {fold, lambda_index}). Every distinct chain maps to
// an effectively independent generator seed, so concurrent tasks can each own
// a deterministic stream regardless of execution order.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> streams);

// Seeded generator wrapping std::mt19937_64. All stochastic behavior in the
// library flows through this class so that runs are reproducible bit-for-bit
// given the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform draw in [0, 1) with full 53-bit mantissa resolution.
  double uniform01();

  // Uniform draw in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal draw via the Box-Muller transform (no call-to-call
  // caching, so the consumed stream length per draw is constant).
  double normal();

  // Uniform integer in [0, n); rejection sampling, exactly unbiased.
  std::uint64_t uniform_int(std::uint64_t n);

  // Uniformly random permutation of {0, ..., n-1} (Fisher-Yates).
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gppen
