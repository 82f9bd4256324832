#pragma once

#include <cstddef>
#include <vector>

#include "abcem/fw.hpp"
#include "abcem/grid.hpp"
#include "abcem/rng.hpp"

namespace abcem::mf {

// The price marginal at balanced fractions relaxes like an
// Ornstein-Uhlenbeck process; these are its coefficients.
struct OuSpec {
  double drift_rate;  // relaxation rate toward the mean
  double mean;        // the fundamental log price
  double diffusion;   // noise scale
};

// Derived from the reduced price SDE at group imbalance n = 0.
OuSpec ou_spec_from_fw(const fw::FwParams& params);

struct GaussianMoments {
  double mean;
  double variance;
};

// Stationary solution of d_p([rate (mean - p)] g) = (diffusion^2/2) d_pp g:
// a Gaussian centered at the mean with variance diffusion^2 / (2 rate).
GaussianMoments ou_stationary_gaussian(const OuSpec& spec);

// Gaussian pdf evaluated at cell centers, normalized on the grid.
std::vector<double> gaussian_cells(const Grid1D& grid, double mean,
                                   double variance);

// Stationary density of the marginal Fokker-Planck equation: upwind
// advection plus centered diffusion, stepped explicitly under the diffusive
// CFL bound until the L1 step change drops below `step_change_tol`, then
// normalized. The grid must span mean +- 8 standard deviations. An empty
// `initial` starts from the analytic Gaussian; far-off initial data reaches
// the same fixed point, just later. Throws convergence_error when the step
// budget runs out.
std::vector<double> ou_steady_state_numeric(
    const OuSpec& spec, const Grid1D& grid,
    std::vector<double> initial = {}, double step_change_tol = 1e-10,
    std::size_t max_steps = 20000000);

// Euler-Maruyama path of the price SDE with the group imbalance pinned at
// `n_fixed`; returns the post-burn-in log prices. The walk starts at the
// fundamental price unless `start_log_price` overrides it.
std::vector<double> fw_frozen_n_simulate(
    const fw::FwParams& params, double n_fixed, std::size_t steps,
    std::size_t burn_in, RngStream& rng,
    std::optional<double> start_log_price = std::nullopt);

}  // namespace abcem::mf
