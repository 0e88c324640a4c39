#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace influence {

/// Counter-based 64-bit generator (SplitMix64).
///
/// The state is a counter advanced by the golden-ratio increment; each output
/// is the SplitMix64 finalizer applied to the state, so the n-th draw is a
/// pure function of (seed, n). Child streams for independent instances are
/// derived by hashing (master seed, stream index), which makes trials
/// reproducible and independent of generation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Deterministic substream: same (master, index) always yields the same
  /// generator, regardless of how many draws the master has made.
  static Rng child(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(mix(master_seed + kGamma * (index + 1)));
  }
  Rng child(std::uint64_t index) const { return child(state_, index); }

  std::uint64_t next_u64() { return mix(state_ += kGamma); }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Rejection sampling, unbiased. n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return next_double() < p;
  }

  /// k distinct values from [0, n), sorted. Partial Fisher-Yates.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + below_int(n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace influence
