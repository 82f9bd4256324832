#include "abcem/wasserstein.hpp"

#include <algorithm>
#include <cmath>

#include "abcem/errors.hpp"

namespace abcem::mf {

namespace {

// Integral of |g| over an interval where g is linear with endpoint values
// g0, g1.
double abs_linear_integral(double g0, double g1, double width) {
  if (width <= 0.0) return 0.0;
  if (g0 * g1 >= 0.0) return 0.5 * std::abs(g0 + g1) * width;
  return width * (g0 * g0 + g1 * g1) / (2.0 * (std::abs(g0) + std::abs(g1)));
}

}  // namespace

double w1_sorted(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw invalid_parameter_error("w1_sorted: empty sample set");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  if (a.size() == b.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
  }

  // Unequal counts: integrate the CDF difference across merged breakpoints.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(a.front(), b.front());
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    const double x = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i]
                                                                       : b[j];
    total += std::abs(static_cast<double>(i) / na -
                      static_cast<double>(j) / nb) *
             (x - prev);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    prev = x;
  }
  return total;
}

double w1_empirical_vs_density(std::vector<double> samples, const Grid1D& grid,
                               std::span<const double> density) {
  if (samples.empty())
    throw invalid_parameter_error("w1_empirical_vs_density: empty samples");
  grid.validate();
  if (density.size() != static_cast<std::size_t>(grid.num_cells))
    throw invalid_parameter_error(
        "w1_empirical_vs_density: density size mismatch");
  const double total_mass = mass(grid, density);
  if (std::abs(total_mass - 1.0) > 1e-6)
    throw invalid_parameter_error(
        "w1_empirical_vs_density: density must be normalized");
  std::sort(samples.begin(), samples.end());

  // Density CDF values at cell edges; piecewise linear in between, flat
  // outside the grid.
  std::vector<double> cdf(grid.num_cells + 1);
  cdf[0] = 0.0;
  for (int c = 0; c < grid.num_cells; ++c)
    cdf[c + 1] = cdf[c] + density[c] * grid.dx();
  const auto density_cdf = [&](double x) -> double {
    if (x <= grid.x_min) return 0.0;
    if (x >= grid.x_max) return cdf.back();
    const double pos = (x - grid.x_min) / grid.dx();
    const int c = std::min(grid.num_cells - 1, static_cast<int>(pos));
    return cdf[c] + density[c] * (x - grid.edge(c));
  };

  std::vector<double> points;
  points.reserve(samples.size() + grid.num_cells + 1);
  for (int c = 0; c <= grid.num_cells; ++c) points.push_back(grid.edge(c));
  points.insert(points.end(), samples.begin(), samples.end());
  std::sort(points.begin(), points.end());

  const double m = static_cast<double>(samples.size());
  double total = 0.0;
  std::size_t consumed = 0;  // samples <= current position
  double prev = points.front();
  double empirical = 0.0;
  while (consumed < samples.size() && samples[consumed] <= prev) ++consumed;
  empirical = static_cast<double>(consumed) / m;
  for (double x : points) {
    if (x > prev) {
      total += abs_linear_integral(density_cdf(prev) - empirical,
                                   density_cdf(x) - empirical, x - prev);
      prev = x;
    }
    while (consumed < samples.size() && samples[consumed] <= x) ++consumed;
    empirical = static_cast<double>(consumed) / m;
  }
  return total;
}

}  // namespace abcem::mf
