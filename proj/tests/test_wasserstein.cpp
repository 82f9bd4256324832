#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "abcem/errors.hpp"
#include "abcem/ou.hpp"
#include "abcem/rng.hpp"
#include "abcem/wasserstein.hpp"

using namespace abcem;
using mf::Grid1D;

namespace {

// Exhaustive assignment oracle for equal-size sample sets: the 1-D optimal
// coupling cost is the minimum over all bijections.
double w1_brute_force(std::vector<double> a, std::vector<double> b) {
  std::sort(b.begin(), b.end());
  double best = 1e300;
  std::vector<std::size_t> idx(b.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end());
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      cost += std::abs(a[i] - b[idx[i]]);
    best = std::min(best, cost / a.size());
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

std::vector<double> random_samples(RngStream& rng, int n) {
  std::vector<double> out(n);
  for (double& x : out) x = rng.normal(0.0, 2.0);
  return out;
}

}  // namespace

TEST_SUITE("wasserstein") {

TEST_CASE("identity, translation, and validation") {
  const std::vector<double> a{0.4, -1.0, 2.5, 0.0};
  CHECK(mf::w1_sorted(a, a) == 0.0);
  CHECK(mf::w1_sorted({3.0, 3.0, 3.0}, {-1.0, -1.0, -1.0}) ==
        doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(mf::w1_sorted({}, {1.0}), abcem::invalid_parameter_error);
}

TEST_CASE("four-point instances match the exhaustive matching oracle") {
  RngStream rng(101, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> a = random_samples(rng, 4);
    const std::vector<double> b = random_samples(rng, 4);
    CHECK(std::abs(mf::w1_sorted(a, b) - w1_brute_force(a, b)) <= 1e-12);
  }
}

TEST_CASE("unequal sample counts integrate the CDF difference exactly") {
  // two atoms {0, 1} vs one atom {1}: |F_a - F_b| is 1/2 on [0, 1)
  CHECK(mf::w1_sorted({0.0, 1.0}, {1.0}) == doctest::Approx(0.5).epsilon(1e-15));
  // duplicating every sample leaves the empirical measure unchanged
  RngStream rng(103, 0);
  const std::vector<double> a = random_samples(rng, 7);
  const std::vector<double> b = random_samples(rng, 5);
  std::vector<double> b_doubled = b;
  b_doubled.insert(b_doubled.end(), b.begin(), b.end());
  CHECK(std::abs(mf::w1_sorted(a, b) - mf::w1_sorted(a, b_doubled)) <= 1e-12);
}

TEST_CASE("metric axioms on random sample sets") {
  RngStream rng(107, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> a = random_samples(rng, 16);
    const std::vector<double> b = random_samples(rng, 16);
    const std::vector<double> c = random_samples(rng, 16);
    const double ab = mf::w1_sorted(a, b);
    const double ba = mf::w1_sorted(b, a);
    const double ac = mf::w1_sorted(a, c);
    const double cb = mf::w1_sorted(c, b);
    CHECK(ab == ba);
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("empirical measure against a grid density") {
  const Grid1D grid{-6.0, 6.0, 512};
  const std::vector<double> density = mf::gaussian_cells(grid, 0.0, 1.0);
  SUBCASE("samples at the density quantiles track it to one cell width") {
    // invert the piecewise-linear CDF at mid-rank quantiles
    const int m = grid.num_cells;
    std::vector<double> cdf(m + 1, 0.0);
    for (int i = 0; i < m; ++i) cdf[i + 1] = cdf[i] + density[i] * grid.dx();
    std::vector<double> samples;
    for (int k = 0; k < m; ++k) {
      const double target = (k + 0.5) / m;
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
      const int cell = std::max<int>(1, it - cdf.begin()) - 1;
      const double excess = (target - cdf[cell]) / density[cell];
      samples.push_back(grid.edge(cell) + excess);
    }
    CHECK(mf::w1_empirical_vs_density(samples, grid, density) < grid.dx());
  }
  SUBCASE("coincident point masses") {
    const Grid1D narrow{-1.0, 1.0, 1024};
    const std::vector<double> spike = mf::gaussian_cells(narrow, 0.2, 1e-8);
    const std::vector<double> samples(50, 0.2);
    CHECK(mf::w1_empirical_vs_density(samples, narrow, spike) <
          2.0 * narrow.dx());
  }
  SUBCASE("shifting every sample moves the distance by at most the shift") {
    RngStream rng(113, 0);
    std::vector<double> samples(200);
    for (double& s : samples) s = rng.normal(0.0, 1.0);
    const double base = mf::w1_empirical_vs_density(samples, grid, density);
    for (double delta : {0.05, 0.3}) {
      std::vector<double> shifted = samples;
      for (double& s : shifted) s += delta;
      const double moved = mf::w1_empirical_vs_density(shifted, grid, density);
      CHECK(std::abs(moved - base) <= delta + 1e-12);
    }
  }
  SUBCASE("agreement with the sample-sample distance at matched sizes") {
    // sampling the density finely makes the two routes nearly coincide
    RngStream rng(117, 0);
    std::vector<double> samples(20000);
    for (double& s : samples) s = rng.normal(0.0, 1.0);
    std::vector<double> grid_samples;
    for (int i = 0; i < grid.num_cells; ++i) {
      const int copies =
          static_cast<int>(std::round(density[i] * grid.dx() * 20000));
      for (int c = 0; c < copies; ++c) grid_samples.push_back(grid.center(i));
    }
    const double direct = mf::w1_empirical_vs_density(samples, grid, density);
    const double via_samples = mf::w1_sorted(samples, grid_samples);
    CHECK(std::abs(direct - via_samples) < 5e-3);
  }
  SUBCASE("unnormalized densities are rejected") {
    std::vector<double> bad = density;
    for (double& v : bad) v *= 1.5;
    CHECK_THROWS_AS(mf::w1_empirical_vs_density({0.0}, grid, bad),
                    abcem::invalid_parameter_error);
    CHECK_THROWS_AS(mf::w1_empirical_vs_density({}, grid, density),
                    abcem::invalid_parameter_error);
  }
}

}  // TEST_SUITE
