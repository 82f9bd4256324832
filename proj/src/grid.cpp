#include "abcem/grid.hpp"

#include <cmath>
#include <numbers>

#include "abcem/errors.hpp"

namespace abcem::mf {

void Grid1D::validate() const {
  if (!(x_min < x_max))
    throw invalid_parameter_error("Grid1D: x_min must be < x_max");
  if (num_cells < 16)
    throw invalid_parameter_error("Grid1D: need at least 16 cells");
}

double mass(const Grid1D& grid, std::span<const double> f) {
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum * grid.dx();
}

double mean_of(const Grid1D& grid, std::span<const double> f) {
  double sum = 0.0;
  double weighted = 0.0;
  for (int i = 0; i < grid.num_cells; ++i) {
    sum += f[i];
    weighted += grid.center(i) * f[i];
  }
  return weighted / sum;
}

double variance_of(const Grid1D& grid, std::span<const double> f) {
  const double m = mean_of(grid, f);
  double sum = 0.0;
  double weighted = 0.0;
  for (int i = 0; i < grid.num_cells; ++i) {
    const double d = grid.center(i) - m;
    sum += f[i];
    weighted += d * d * f[i];
  }
  return weighted / sum;
}

void GroupDensity::validate() const {
  grid.validate();
  if (!(grid.x_min > 0.0))
    throw invalid_parameter_error("GroupDensity: wealth axis must be positive");
  if (groups.empty())
    throw invalid_parameter_error("GroupDensity: no groups");
  double total_weight = 0.0;
  for (const Group& g : groups) {
    if (!(g.gamma > 0.0 && g.gamma < 1.0))
      throw invalid_parameter_error("GroupDensity: gamma must lie in (0,1)");
    if (!(g.weight >= 0.0))
      throw invalid_parameter_error("GroupDensity: negative group weight");
    total_weight += g.weight;
    if (g.density.size() != static_cast<std::size_t>(grid.num_cells))
      throw invalid_parameter_error("GroupDensity: density size mismatch");
    for (double v : g.density)
      if (v < 0.0)
        throw invalid_parameter_error("GroupDensity: negative density value");
    if (std::abs(mass(grid, g.density) - 1.0) > 1e-8)
      throw invalid_parameter_error("GroupDensity: group mass must be 1");
  }
  if (std::abs(total_weight - 1.0) > 1e-12)
    throw invalid_parameter_error("GroupDensity: weights must sum to 1");
}

std::vector<double> lognormal_cells(const Grid1D& grid, double ln_mean,
                                    double ln_var) {
  if (!(ln_var > 0.0))
    throw invalid_parameter_error("lognormal_cells: ln_var must be > 0");
  std::vector<double> f(grid.num_cells);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * ln_var);
  for (int i = 0; i < grid.num_cells; ++i) {
    const double w = grid.center(i);
    const double d = std::log(w) - ln_mean;
    f[i] = norm / w * std::exp(-0.5 * d * d / ln_var);
  }
  const double m = mass(grid, f);
  for (double& v : f) v /= m;
  return f;
}

GroupDensity make_group_density(const Grid1D& grid,
                                std::span<const GroupSpec> specs) {
  GroupDensity out;
  out.grid = grid;
  for (const GroupSpec& s : specs)
    out.groups.push_back(
        {s.gamma, s.weight, lognormal_cells(grid, s.ln_mean, s.ln_var)});
  out.validate();
  return out;
}

}  // namespace abcem::mf
