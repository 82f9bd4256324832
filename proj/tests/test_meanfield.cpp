#include <doctest.h>

#include <cmath>
#include <vector>

#include "abcem/errors.hpp"
#include "abcem/ou.hpp"
#include "abcem/particles.hpp"
#include "abcem/rng.hpp"
#include "abcem/transport.hpp"

using namespace abcem;
using mf::Grid1D;
using mf::GroupDensity;
using mf::GroupSpec;

namespace {

const auto kZeroDividend = [](double) { return 0.0; };

double first_moment(const Grid1D& grid, const std::vector<double>& f) {
  double m = 0.0;
  for (int i = 0; i < grid.num_cells; ++i) m += grid.center(i) * f[i];
  return m * grid.dx();
}

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("nonlocal drift coefficient") {
  SUBCASE("a sharp profile approaches gamma (1-gamma) times its mean") {
    const Grid1D grid{900.0, 1100.0, 4096};
    GroupDensity d;
    d.grid = grid;
    std::vector<double> f(grid.num_cells);
    for (int i = 0; i < grid.num_cells; ++i) {
      const double x = grid.center(i) - 1000.0;
      f[i] = std::exp(-0.5 * x * x / 0.01);
    }
    const double m = mf::mass(grid, f);
    for (double& v : f) v /= m;
    d.groups.push_back({0.5, 1.0, f});
    CHECK(mf::mf_coefficient(d) == doctest::Approx(250.0).epsilon(1e-4));
  }
  SUBCASE("mirror-symmetric groups match the single-group value") {
    const Grid1D grid{0.1, 10.0, 512};
    const std::vector<GroupSpec> split = {{0.3, 0.5, 0.0, 1.0},
                                          {0.7, 0.5, 0.0, 1.0}};
    const std::vector<GroupSpec> single = {{0.3, 1.0, 0.0, 1.0}};
    CHECK(mf::mf_coefficient(mf::make_group_density(grid, split)) ==
          doctest::Approx(
              mf::mf_coefficient(mf::make_group_density(grid, single)))
              .epsilon(1e-12));
  }
  SUBCASE("zero density is singular") {
    GroupDensity d;
    d.grid = {0.1, 10.0, 64};
    d.groups.push_back({0.5, 1.0, std::vector<double>(64, 0.0)});
    CHECK_THROWS_AS(mf::mf_coefficient(d), abcem::singular_coefficient_error);
  }
}

TEST_CASE("group transport") {
  const Grid1D grid{0.01, 200.0, 4096};
  SUBCASE("pure growth obeys the first-moment law") {
    GroupDensity f0 = mf::make_group_density(
        grid, std::vector<GroupSpec>{{0.5, 1.0, 0.0, 1.0}});
    const double m0 = first_moment(grid, f0.groups[0].density);
    const double r = 0.04;
    const mf::TransportRun run = mf::evolve_transport(f0, kZeroDividend, r, 1.0);
    const double m1 = first_moment(grid, run.density.groups[0].density);
    CHECK(std::abs(m1 / (m0 * std::exp(r)) - 1.0) < 0.005);
    CHECK(run.max_step_mass_error <= 1e-10);
    CHECK(std::abs(mf::mass(grid, run.density.groups[0].density) - 1.0) < 1e-6);
    CHECK(run.outflow < 1e-6);
  }
  SUBCASE("a zero group is transported to zero") {
    GroupDensity f0 = mf::make_group_density(
        grid, std::vector<GroupSpec>{{0.5, 1.0, 0.0, 1.0}});
    f0.groups.push_back({0.25, 0.0, std::vector<double>(grid.num_cells, 0.0)});
    const mf::TransportStep stepped =
        mf::mf_transport_step(f0, kZeroDividend, 0.04, 1e-3);
    for (double v : stepped.density.groups[1].density) CHECK(v == 0.0);
  }
  SUBCASE("upwind transport keeps densities nonnegative") {
    GroupDensity current = mf::make_group_density(
        grid, std::vector<GroupSpec>{{0.4, 1.0, 0.0, 1.0}});
    for (int k = 0; k < 50; ++k) {
      const double dt = mf::transport_max_dt(current, 0.1, 0.04) * 0.999;
      current =
          mf::mf_transport_step(current, [](double) { return 0.1; }, 0.04, dt)
              .density;
      for (double v : current.groups[0].density) CHECK(v >= 0.0);
    }
  }
  SUBCASE("a step beyond the CFL bound is rejected") {
    GroupDensity f0 = mf::make_group_density(
        grid, std::vector<GroupSpec>{{0.5, 1.0, 0.0, 1.0}});
    const double limit = mf::transport_max_dt(f0, 0.0, 0.04);
    CHECK_THROWS_AS(mf::mf_transport_step(f0, kZeroDividend, 0.04, 2.0 * limit),
                    abcem::cfl_error);
  }
}

TEST_CASE("mean-reverting toy transport") {
  const Grid1D grid{-10.0, 10.0, 4096};
  std::vector<double> f = mf::gaussian_cells(grid, 0.5, 1.0);
  const double mean0 = mf::mean_of(grid, f);
  const double var0 = mf::variance_of(grid, f);
  const double mass0 = mf::mass(grid, f);
  double t = 0.0;
  while (t < 1.0 - 1e-12) {
    const double dt = std::min(mf::toy_max_dt(grid, f), 1.0 - t);
    f = mf::toy_mf_step(grid, f, dt);
    t += dt;
  }
  // the mean is conserved, the variance contracts at rate two, no mass
  // crosses the walls (the drift points inward there)
  CHECK(std::abs(mf::mean_of(grid, f) - mean0) < 1e-4);
  CHECK(std::abs(mf::variance_of(grid, f) / (var0 * std::exp(-2.0)) - 1.0) <
        0.02);
  CHECK(std::abs(mf::mass(grid, f) - mass0) < 1e-12);
}

TEST_CASE("toy transport keeps a symmetric profile symmetric") {
  const Grid1D grid{-8.0, 8.0, 1024};
  std::vector<double> f = mf::gaussian_cells(grid, 0.0, 2.0);
  for (int k = 0; k < 200; ++k)
    f = mf::toy_mf_step(grid, f, mf::toy_max_dt(grid, f) * 0.9);
  for (int i = 0; i < grid.num_cells / 2; ++i)
    CHECK(f[i] == doctest::Approx(f[grid.num_cells - 1 - i]).epsilon(1e-10));
}

TEST_CASE("interacting particle integration") {
  SUBCASE("no dividend decouples into exponential growth") {
    const std::vector<double> w0{1.0, 2.0, 5.0};
    const std::vector<double> gammas{0.2, 0.5, 0.8};
    const mf::ParticleRun run =
        mf::simplified_particle_run(w0, gammas, 0.3, kZeroDividend, 1.0, 1e-3);
    for (std::size_t i = 0; i < w0.size(); ++i)
      CHECK(std::abs(run.wealth.back()[i] / (w0[i] * std::exp(0.3)) - 1.0) <
            1e-8);
  }
  SUBCASE("identical agents remain identical") {
    const std::vector<double> w0(8, 3.0);
    const std::vector<double> gammas(8, 0.4);
    const mf::ParticleRun run = mf::simplified_particle_run(
        w0, gammas, 0.05, [](double) { return 0.2; }, 2.0, 1e-3);
    for (double w : run.wealth.back()) CHECK(w == run.wealth.back().front());
  }
  SUBCASE("two agents match a tiny-step explicit-Euler oracle") {
    const std::vector<double> w0{1.0, 4.0};
    const std::vector<double> gammas{0.3, 0.7};
    const double r = 0.1;
    const auto dividend = [](double t) { return 0.2 + 0.05 * t; };
    const mf::ParticleRun run =
        mf::simplified_particle_run(w0, gammas, r, dividend, 1.0, 1e-3);

    // independent refinement oracle: explicit Euler at dt = 1e-6
    std::vector<double> w = w0;
    const double h = 1e-6;
    for (int k = 0; k < 1000000; ++k) {
      const double t = k * h;
      const double denom = 0.5 * ((1 - gammas[0]) * gammas[0] * w[0] +
                                  (1 - gammas[1]) * gammas[1] * w[1]);
      const double z = dividend(t);
      const double d0 = r * w[0] + gammas[0] * w[0] * z / denom;
      const double d1 = r * w[1] + gammas[1] * w[1] * z / denom;
      w[0] += h * d0;
      w[1] += h * d1;
    }
    CHECK(std::abs(run.wealth.back()[0] / w[0] - 1.0) < 1e-6);
    CHECK(std::abs(run.wealth.back()[1] / w[1] - 1.0) < 1e-6);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(
        mf::simplified_particle_run({}, {}, 0.1, kZeroDividend, 1.0, 1e-3),
        abcem::invalid_parameter_error);
    const std::vector<double> w0{1.0};
    const std::vector<double> bad_gamma{1.5};
    CHECK_THROWS_AS(
        mf::simplified_particle_run(w0, bad_gamma, 0.1, kZeroDividend, 1.0,
                                    1e-3),
        abcem::invalid_parameter_error);
  }
}

TEST_CASE("log-normal profile persistence") {
  const Grid1D grid{std::exp(-4.0), std::exp(5.5), 8192};
  const std::vector<GroupSpec> three = {{0.2, 1.0 / 3, 0.0, 1.0},
                                        {0.4, 1.0 / 3, 0.0, 1.0},
                                        {0.6, 1.0 / 3, 0.0, 1.0}};
  SUBCASE("zero horizon recovers the initial profile") {
    const mf::AnsatzCheck check =
        mf::lognormal_ansatz_check(grid, three, 0.04, kZeroDividend, 0.0);
    CHECK(check.max_l1_residual < 1e-3);
    for (const mf::AnsatzGroupFit& g : check.groups) {
      CHECK(std::abs(g.fitted_shift) < 1e-12);
      CHECK(std::abs(g.predicted_shift) < 1e-12);
    }
  }
  SUBCASE("pure growth shifts the ln-mean by r T") {
    const mf::AnsatzCheck check =
        mf::lognormal_ansatz_check(grid, three, 0.04, kZeroDividend, 1.0);
    for (const mf::AnsatzGroupFit& g : check.groups)
      CHECK(std::abs(g.fitted_shift - 0.04) < 1e-3);
  }
  SUBCASE("interacting transport keeps the profile log-normal") {
    const mf::AnsatzCheck check = mf::lognormal_ansatz_check(
        grid, three, 0.04, [](double) { return 0.1; }, 1.0);
    CHECK(check.max_l1_residual < 2e-2);
    for (const mf::AnsatzGroupFit& g : check.groups) {
      CHECK(std::abs(g.fitted_shift / g.predicted_shift - 1.0) <= 0.01);
      CHECK(std::abs(g.ln_variance - 1.0) <= 0.01);
    }
  }
}

TEST_CASE("convergence table under pure exponential transport") {
  // with no dividend both descriptions dilate by e^{rT}, so the sampled
  // discrepancy is carried along: W1(T) tracks e^{rT} W1(0)
  const Grid1D grid{std::exp(-4.0), std::exp(5.0), 8192};
  const std::vector<GroupSpec> one = {{0.5, 1.0, 0.0, 1.0}};
  const std::vector<int> counts = {100};
  const double r = 0.1;
  RngStream rng(2024, 0);
  const mf::ConvergenceTable table = mf::convergence_rate_table(
      grid, one, r, kZeroDividend, 1.0, 1e-3, counts, rng);
  REQUIRE(table.particles.size() == 1);
  CHECK(table.w1_initial[0] > 0.0);
  CHECK(std::abs(table.w1_final[0] / (table.w1_initial[0] * std::exp(r)) -
                 1.0) <= 0.1);
}

TEST_CASE("group density validation") {
  const Grid1D grid{0.5, 10.0, 64};
  GroupDensity d = mf::make_group_density(
      grid, std::vector<GroupSpec>{{0.5, 1.0, 0.5, 0.25}});
  CHECK_NOTHROW(d.validate());
  SUBCASE("weights must sum to one") {
    d.groups[0].weight = 0.9;
    CHECK_THROWS_AS(d.validate(), abcem::invalid_parameter_error);
  }
  SUBCASE("densities must be nonnegative") {
    d.groups[0].density[3] = -1e-9;
    CHECK_THROWS_AS(d.validate(), abcem::invalid_parameter_error);
  }
  SUBCASE("wealth grids must be positive") {
    d.grid.x_min = -0.5;
    CHECK_THROWS_AS(d.validate(), abcem::invalid_parameter_error);
  }
}

}  // TEST_SUITE
