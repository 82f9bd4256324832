#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace abcem::mf {

struct ParticleRun {
  std::vector<double> times;
  std::vector<std::vector<double>> wealth;  // one vector per recorded time
};

// Classical fourth-order one-step integration of the interacting system
//   dw_i/dt = r w_i + gamma_i w_i Z(t) / ((1/N) sum_j (1-gamma_j) gamma_j w_j).
// Records the initial state, every `record_stride`-th step when the stride
// is nonzero, and the final state. Throws singular_coefficient_error when
// the interaction denominator is not positive.
ParticleRun simplified_particle_run(std::span<const double> w0,
                                    std::span<const double> gammas, double r,
                                    const std::function<double(double)>& dividend,
                                    double horizon, double dt,
                                    std::size_t record_stride = 0);

}  // namespace abcem::mf
