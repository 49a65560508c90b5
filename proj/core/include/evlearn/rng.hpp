#pragma once

#include <cstdint>
#include <random>

namespace evlearn {

// Hash-derived child seed. Used to fan a master seed out to sessions,
// runs and other independent streams without correlated state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt);

// Deterministic random source. All draws are defined in terms of
// mt19937_64 output words only, so two builds on the same platform
// produce identical streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller (two words per pair, cached).
  double normal();

  // Normal with the given standard deviation.
  double normal(double stddev) { return normal() * stddev; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_word() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace evlearn
