#include "abcem/ou.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "abcem/errors.hpp"

namespace abcem::mf {

OuSpec ou_spec_from_fw(const fw::FwParams& params) {
  // drift(P) = rate (F - P); evaluating one unit below F isolates the rate.
  const fw::DriftDiffusion at_unit_misalignment =
      fw::continuous_coefficients(params.fundamental_price - 1.0, 0.0, params);
  return {at_unit_misalignment.drift, params.fundamental_price,
          at_unit_misalignment.diffusion};
}

GaussianMoments ou_stationary_gaussian(const OuSpec& spec) {
  if (!(spec.drift_rate > 0.0))
    throw invalid_parameter_error(
        "ou_stationary_gaussian: drift rate must be positive");
  return {spec.mean,
          spec.diffusion * spec.diffusion / (2.0 * spec.drift_rate)};
}

std::vector<double> gaussian_cells(const Grid1D& grid, double mean,
                                   double variance) {
  if (!(variance > 0.0))
    throw invalid_parameter_error("gaussian_cells: variance must be > 0");
  std::vector<double> f(grid.num_cells);
  for (int i = 0; i < grid.num_cells; ++i) {
    const double d = grid.center(i) - mean;
    f[i] = std::exp(-0.5 * d * d / variance);
  }
  const double m = mass(grid, f);
  for (double& v : f) v /= m;
  return f;
}

std::vector<double> ou_steady_state_numeric(const OuSpec& spec,
                                            const Grid1D& grid,
                                            std::vector<double> initial,
                                            double step_change_tol,
                                            std::size_t max_steps) {
  const GaussianMoments stationary = ou_stationary_gaussian(spec);
  const double sd = std::sqrt(stationary.variance);
  if (grid.x_min > spec.mean - 8.0 * sd + 1e-12 ||
      grid.x_max < spec.mean + 8.0 * sd - 1e-12)
    throw invalid_parameter_error(
        "ou_steady_state_numeric: grid must span mean +- 8 std deviations");
  if (initial.empty())
    initial = gaussian_cells(grid, stationary.mean, stationary.variance);
  if (initial.size() != static_cast<std::size_t>(grid.num_cells))
    throw invalid_parameter_error(
        "ou_steady_state_numeric: initial density size mismatch");

  const int c = grid.num_cells;
  const double dx = grid.dx();
  const double diffusivity = 0.5 * spec.diffusion * spec.diffusion;
  double speed = 0.0;
  std::vector<double> velocity(c + 1);
  for (int i = 0; i <= c; ++i) {
    velocity[i] = spec.drift_rate * (spec.mean - grid.edge(i));
    speed = std::max(speed, std::abs(velocity[i]));
  }
  const double dt = 0.8 / (2.0 * diffusivity / (dx * dx) + speed / dx);

  std::vector<double> f = std::move(initial);
  std::vector<double> next(c);
  std::vector<double> flux(c + 1);
  for (std::size_t step = 0; step < max_steps; ++step) {
    // advective flux, upwind; zero-flux walls (the drift points inward)
    flux[0] = 0.0;
    flux[c] = 0.0;
    for (int i = 1; i < c; ++i)
      flux[i] = velocity[i] * (velocity[i] >= 0.0 ? f[i - 1] : f[i]);
    double change = 0.0;
    for (int i = 0; i < c; ++i) {
      const double left = i > 0 ? f[i - 1] : f[i];
      const double right = i < c - 1 ? f[i + 1] : f[i];
      next[i] = f[i] - dt / dx * (flux[i + 1] - flux[i]) +
                dt * diffusivity / (dx * dx) * (right - 2.0 * f[i] + left);
      change += std::abs(next[i] - f[i]);
    }
    f.swap(next);
    if (change * dx < step_change_tol) {
      const double m = mass(grid, f);
      for (double& v : f) v /= m;
      return f;
    }
  }
  throw convergence_error(
      "ou_steady_state_numeric: no steady state within the step budget");
}

std::vector<double> fw_frozen_n_simulate(const fw::FwParams& params,
                                         double n_fixed, std::size_t steps,
                                         std::size_t burn_in, RngStream& rng,
                                         std::optional<double> start_log_price) {
  std::vector<double> samples;
  samples.reserve(steps);
  double p = start_log_price.value_or(params.fundamental_price);
  const double sqrt_dt = std::sqrt(params.dt);
  for (std::size_t k = 0; k < burn_in + steps; ++k) {
    const fw::DriftDiffusion coeff =
        fw::continuous_coefficients(p, n_fixed, params);
    p += coeff.drift * params.dt +
         coeff.diffusion * sqrt_dt * rng.standard_normal();
    if (k >= burn_in) samples.push_back(p);
  }
  return samples;
}

}  // namespace abcem::mf
