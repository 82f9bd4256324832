#pragma once

#include <span>
#include <vector>

namespace abcem::mf {

// Uniform cell-centered 1-D grid. Wealth grids additionally require
// x_min > 0; that is enforced by GroupDensity, not here, because the toy
// model and the price marginal live on signed axes.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int num_cells = 16;

  double dx() const { return (x_max - x_min) / num_cells; }
  double center(int i) const { return x_min + (i + 0.5) * dx(); }
  double edge(int i) const { return x_min + i * dx(); }

  void validate() const;  // x_min < x_max, num_cells >= 16
};

// Midpoint-rule integrals of cell-centered data.
double mass(const Grid1D& grid, std::span<const double> f);
double mean_of(const Grid1D& grid, std::span<const double> f);
double variance_of(const Grid1D& grid, std::span<const double> f);

// One gamma atom of the discretized mean-field density.
struct Group {
  double gamma;
  double weight;
  std::vector<double> density;
};

struct GroupDensity {
  Grid1D grid;
  std::vector<Group> groups;
  double time = 0.0;

  // Weights sum to one, every group density is nonnegative with unit mass
  // (1e-8), gamma atoms lie in (0,1), and the wealth axis is positive.
  void validate() const;
};

// Log-normal profile (ln-mean, ln-variance) evaluated at cell centers and
// normalized to unit midpoint mass on the grid.
std::vector<double> lognormal_cells(const Grid1D& grid, double ln_mean,
                                    double ln_var);

struct GroupSpec {
  double gamma;
  double weight;
  double ln_mean = 0.0;
  double ln_var = 1.0;
};

GroupDensity make_group_density(const Grid1D& grid,
                                std::span<const GroupSpec> specs);

}  // namespace abcem::mf
