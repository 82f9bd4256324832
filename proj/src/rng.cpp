#include "abcem/rng.hpp"

#include <cmath>
#include <numbers>

#include "abcem/errors.hpp"

namespace abcem {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t run_index) {
  return splitmix64(splitmix64(seed) ^ run_index);
}

double RngStream::uniform01() {
  ++draws_;
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (lo > hi) {
    throw invalid_parameter_error("uniform: lo > hi");
  }
  return lo + uniform01() * (hi - lo);
}

double RngStream::standard_normal() {
  if (has_pending_normal_) {
    has_pending_normal_ = false;
    ++draws_;
    return pending_normal_;
  }
  // Box-Muller; u1 shifted into (0, 1] so the log stays finite.
  const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  pending_normal_ = radius * std::sin(angle);
  has_pending_normal_ = true;
  ++draws_;
  return radius * std::cos(angle);
}

double RngStream::normal(double mean, double stddev) {
  if (stddev < 0.0) {
    throw invalid_parameter_error("normal: negative stddev");
  }
  return mean + stddev * standard_normal();
}

}  // namespace abcem
