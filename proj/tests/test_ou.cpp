#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "abcem/errors.hpp"
#include "abcem/fw.hpp"
#include "abcem/ou.hpp"
#include "abcem/rng.hpp"

using namespace abcem;
using mf::Grid1D;
using mf::OuSpec;

TEST_SUITE("ou") {

TEST_CASE("reduced-price coefficients from the market parameters") {
  const fw::FwParams p;
  const OuSpec spec = mf::ou_spec_from_fw(p);
  const double denom = 1.0 - 0.5 * p.mu * p.chi;
  CHECK(spec.drift_rate ==
        doctest::Approx(0.5 * p.mu * p.phi / denom).epsilon(1e-13));
  CHECK(spec.diffusion ==
        doctest::Approx(0.5 * p.mu * (p.sigma_f + p.sigma_c) / denom)
            .epsilon(1e-13));
  CHECK(spec.mean == p.fundamental_price);
}

TEST_CASE("stationary Gaussian moments") {
  OuSpec spec{0.5, 2.0, 0.1};
  const mf::GaussianMoments base = mf::ou_stationary_gaussian(spec);
  CHECK(base.mean == 2.0);
  CHECK(base.variance == doctest::Approx(0.01).epsilon(1e-14));

  // doubling the noise scale quadruples the variance
  spec.diffusion = 0.2;
  CHECK(mf::ou_stationary_gaussian(spec).variance ==
        doctest::Approx(4.0 * base.variance).epsilon(1e-14));

  // vanishing noise collapses onto the mean
  spec.diffusion = 1e-9;
  CHECK(mf::ou_stationary_gaussian(spec).variance ==
        doctest::Approx(1e-18 / (2.0 * 0.5)).epsilon(1e-12));

  spec.drift_rate = 0.0;
  CHECK_THROWS_AS(mf::ou_stationary_gaussian(spec),
                  abcem::invalid_parameter_error);
}

TEST_CASE("numeric steady state approaches the analytic Gaussian") {
  const OuSpec spec = mf::ou_spec_from_fw(fw::FwParams{});
  const mf::GaussianMoments analytic = mf::ou_stationary_gaussian(spec);
  const double sd = std::sqrt(analytic.variance);
  const Grid1D grid{analytic.mean - 8.0 * sd, analytic.mean + 8.0 * sd, 1024};
  const std::vector<double> numeric = mf::ou_steady_state_numeric(spec, grid);
  const std::vector<double> gauss =
      mf::gaussian_cells(grid, analytic.mean, analytic.variance);
  double l1 = 0.0, mass = 0.0;
  for (int i = 0; i < grid.num_cells; ++i) {
    l1 += std::abs(numeric[i] - gauss[i]);
    mass += numeric[i];
  }
  CHECK(l1 * grid.dx() < 6e-3);  // first-order scheme at this resolution
  CHECK(mass * grid.dx() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("far-off initial data relaxes to the same fixed point") {
  const OuSpec spec = mf::ou_spec_from_fw(fw::FwParams{});
  const mf::GaussianMoments analytic = mf::ou_stationary_gaussian(spec);
  const double sd = std::sqrt(analytic.variance);
  const Grid1D grid{analytic.mean - 8.0 * sd, analytic.mean + 8.0 * sd, 512};
  const std::vector<double> from_gaussian =
      mf::ou_steady_state_numeric(spec, grid);
  const std::vector<double> from_far = mf::ou_steady_state_numeric(
      spec, grid, mf::gaussian_cells(grid, analytic.mean + 6.0 * sd,
                                     0.01 * analytic.variance));
  double gap = 0.0;
  for (int i = 0; i < grid.num_cells; ++i)
    gap += std::abs(from_gaussian[i] - from_far[i]);
  CHECK(gap * grid.dx() < 1e-4);
}

TEST_CASE("exhausting the step budget reports non-convergence") {
  const OuSpec spec = mf::ou_spec_from_fw(fw::FwParams{});
  const mf::GaussianMoments analytic = mf::ou_stationary_gaussian(spec);
  const double sd = std::sqrt(analytic.variance);
  const Grid1D grid{analytic.mean - 8.0 * sd, analytic.mean + 8.0 * sd, 512};
  CHECK_THROWS_AS(
      mf::ou_steady_state_numeric(
          spec, grid,
          mf::gaussian_cells(grid, analytic.mean + 5.0 * sd, analytic.variance),
          1e-10, 10),
      abcem::convergence_error);
}

TEST_CASE("grid narrower than eight standard deviations is rejected") {
  const OuSpec spec = mf::ou_spec_from_fw(fw::FwParams{});
  const mf::GaussianMoments analytic = mf::ou_stationary_gaussian(spec);
  const double sd = std::sqrt(analytic.variance);
  const Grid1D grid{analytic.mean - 4.0 * sd, analytic.mean + 4.0 * sd, 512};
  CHECK_THROWS_AS(mf::ou_steady_state_numeric(spec, grid),
                  abcem::invalid_parameter_error);
}

TEST_CASE("frozen-fraction walk") {
  fw::FwParams p;
  RngStream rng(71, 0);
  SUBCASE("negligible noise relaxes to the fundamental price") {
    p.sigma_f = 1e-12;
    p.sigma_c = 1e-12;
    const std::vector<double> samples =
        mf::fw_frozen_n_simulate(p, 0.0, 10, 20000, rng, p.fundamental_price + 2.0);
    CHECK(std::abs(samples.back() - p.fundamental_price) < 1e-6);
  }
  SUBCASE("sample mean settles near the fundamental price") {
    const std::size_t n = 200000;
    const std::vector<double> samples =
        mf::fw_frozen_n_simulate(p, 0.0, n, 20000, rng);
    const OuSpec spec = mf::ou_spec_from_fw(p);
    const mf::GaussianMoments analytic = mf::ou_stationary_gaussian(spec);
    const double rho = 1.0 - spec.drift_rate * p.dt;
    const double ess = n / ((1.0 + rho) / (1.0 - rho));
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    CHECK(std::abs(mean - p.fundamental_price) <
          3.0 * std::sqrt(analytic.variance / ess));
  }
}

}  // TEST_SUITE
