#pragma once

#include <cstdint>
#include <random>

namespace gaitevo {

// Every random draw in the library goes through this wrapper. The engine is
// std::mt19937_64, whose output sequence is pinned by the standard; the
// bounded draws are implemented here because std::uniform_int_distribution
// and std::bernoulli_distribution are implementation-defined and would break
// run reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased draw in [0, range). Rejects below 2^64 mod range.
  std::uint64_t bounded(std::uint64_t range) {
    const std::uint64_t threshold = (0 - range) % range;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % range;
    }
  }

  // Uniform integer in [lo, hi], both ends inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t range =
        static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
    return static_cast<int>(lo + static_cast<std::int64_t>(bounded(range)));
  }

  // Uniform in [0, 1), 53 bits of precision. (next_u64() >> 11) is exactly
  // representable, so the scaling is a single exact multiply.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gaitevo
