#pragma once

#include <span>
#include <vector>

#include "abcem/grid.hpp"

namespace abcem::mf {

// Exact 1-D Wasserstein-1 distance between two empirical measures. Equal
// sample counts reduce to the mean absolute difference of sorted samples;
// unequal counts are handled through the CDF-difference integral. Throws
// invalid_parameter_error on empty input.
double w1_sorted(std::vector<double> a, std::vector<double> b);

// Exact W1 between an empirical measure and a normalized cell-centered
// density: the integral of |F_emp - F_density|, the density CDF piecewise
// linear across cells. Throws invalid_parameter_error if the density mass
// is not 1 (1e-6) or the samples are empty.
double w1_empirical_vs_density(std::vector<double> samples, const Grid1D& grid,
                               std::span<const double> density);

}  // namespace abcem::mf
