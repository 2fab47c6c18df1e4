#pragma once

#include <cstdint>
#include <random>

namespace boundselect {

// SplitMix64 finalizer; used to derive independent stream seeds from a
// master seed and a counter.
std::uint64_t mix64(std::uint64_t x);

// Seed for stream `stream` of master seed `seed`. Streams are a pure
// function of (seed, stream), so replication results do not depend on
// scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Portable random source: the engine sequence is fixed by the standard, and
// the uniform/normal transforms are implemented here rather than taken from
// <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace boundselect
