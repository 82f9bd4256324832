#pragma once

#include <cstdint>
#include <random>

namespace abcem {

// SplitMix64 finalizer; used to turn (seed, run_index) pairs into
// well-separated generator seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Seed material for ensemble member `run_index` of base seed `seed`:
// two SplitMix64 rounds, the run index folded in between. Distinct pairs
// give statistically independent streams without a central coordinator.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t run_index);

// Deterministic, seedable stream of uniform and normal draws on top of a
// 64-bit Mersenne Twister. Normal variates come from Box-Muller (one
// cached companion value), the single normal-sampling method used
// repo-wide; uniforms take the top 53 bits of each generator word. A
// stream is single-owner: ensembles construct one per run.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t run_index = 0)
      : gen_(mix_seed(seed, run_index)) {}

  // U[lo, hi]; lo == hi returns lo exactly. Throws invalid_parameter_error
  // if lo > hi.
  double uniform(double lo, double hi);

  // N(mean, stddev^2); stddev == 0 returns mean exactly. Throws
  // invalid_parameter_error if stddev < 0.
  double normal(double mean, double stddev);

  double standard_normal();

  // U[0, 1) with 53-bit resolution.
  double uniform01();

  std::uint64_t draw_count() const { return draws_; }

 private:
  std::mt19937_64 gen_;
  double pending_normal_ = 0.0;
  bool has_pending_normal_ = false;
  std::uint64_t draws_ = 0;
};

}  // namespace abcem
