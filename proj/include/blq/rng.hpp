#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace blq {

// Counter-based generator: draw i of stream s under seed k is a pure function
// of (k, s, i), so chunked or parallel consumers reproduce the same numbers
// regardless of scheduling. Mixing is SplitMix64's finalizer applied twice.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix(mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL)) + counter);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on counters (2i, 2i+1).
  double normal(std::uint64_t i) const {
    double u1 = uniform(2 * i);
    double u2 = uniform(2 * i + 1);
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  constexpr CounterRng substream(std::uint64_t s) const { return CounterRng(seed_, mix(stream_ ^ (s + 1))); }
  constexpr std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// Sequential view over a CounterRng for code that just wants "the next draw".
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : gen_(seed, stream) {}
  explicit Rng(CounterRng gen) : gen_(gen) {}

  double uniform() { return gen_.uniform(counter_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return gen_.normal(counter_++); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }
  bool bernoulli(double prob) { return uniform() < prob; }
  Rng fork(std::uint64_t s) const { return Rng(gen_.substream(s)); }

 private:
  CounterRng gen_;
  std::uint64_t counter_ = 0;
};

}  // namespace blq
