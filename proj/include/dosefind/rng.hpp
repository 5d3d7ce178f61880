#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace dosefind {

/// Advances a splitmix64 state and returns the next output word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** generator. Small state, fast, and cheap to construct, so
/// every simulation replication can own an independent instance derived
/// from (seed, replication index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return next_double() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

/// Independent stream for one replication. Mixing the replication index
/// through splitmix64 keeps streams identical no matter how replications
/// are partitioned across workers.
inline Rng replication_rng(std::uint64_t seed, std::uint64_t replication) noexcept {
  std::uint64_t sm = seed ^ (0x632be59bd9b4e019ULL + replication * 0x9e3779b97f4a7c15ULL);
  return Rng(splitmix64_next(sm));
}

/// Number of events among `n` independent Bernoulli(p) trials. Cohorts in
/// this library are small (1..8 patients), so per-trial draws beat any
/// clever sampler. p == 0 and p == 1 short-circuit without consuming
/// random numbers.
inline int binomial_draw(Rng& rng, int n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) {
    throw std::invalid_argument("binomial_draw: need n >= 0 and p in [0,1]");
  }
  if (p == 0.0) return 0;
  if (p == 1.0) return n;
  int events = 0;
  for (int i = 0; i < n; ++i) events += rng.bernoulli(p) ? 1 : 0;
  return events;
}

}  // namespace dosefind
