#include <algorithm>
#include <cmath>
#include <utility>

#include "abcem/errors.hpp"
#include "abcem/particles.hpp"
#include "abcem/transport.hpp"
#include "abcem/wasserstein.hpp"

namespace abcem::mf {

namespace {

// Largest-remainder apportionment of `total` across the group weights.
std::vector<int> apportion(std::span<const GroupSpec> specs, int total) {
  std::vector<int> counts(specs.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t g = 0; g < specs.size(); ++g) {
    const double exact = specs[g].weight * total;
    counts[g] = static_cast<int>(std::floor(exact));
    assigned += counts[g];
    remainders.emplace_back(-(exact - counts[g]), g);
  }
  std::sort(remainders.begin(), remainders.end());
  for (int k = 0; k < total - assigned; ++k)
    ++counts[remainders[static_cast<std::size_t>(k) % remainders.size()]
                 .second];
  return counts;
}

}  // namespace

ConvergenceTable convergence_rate_table(
    const Grid1D& grid, std::span<const GroupSpec> specs,
    const std::vector<std::vector<double>>& initial_density,
    const std::vector<std::vector<double>>& final_density, double r,
    const TimeFunction& dividend, double horizon, double particle_dt,
    std::span<const int> particle_counts, RngStream& rng) {
  if (specs.empty() || initial_density.size() != specs.size() ||
      final_density.size() != specs.size())
    throw invalid_parameter_error(
        "convergence_rate_table: density/group size mismatch");

  ConvergenceTable table;
  for (const int n : particle_counts) {
    const std::vector<int> counts = apportion(specs, n);
    std::vector<double> w0, gammas;
    w0.reserve(n);
    gammas.reserve(n);
    std::vector<std::vector<double>> group_samples(specs.size());
    for (std::size_t g = 0; g < specs.size(); ++g) {
      for (int k = 0; k < counts[g]; ++k) {
        const double w =
            std::exp(rng.normal(specs[g].ln_mean, std::sqrt(specs[g].ln_var)));
        w0.push_back(w);
        gammas.push_back(specs[g].gamma);
        group_samples[g].push_back(w);
      }
    }

    double before = 0.0;
    for (std::size_t g = 0; g < specs.size(); ++g)
      before += specs[g].weight *
                w1_empirical_vs_density(group_samples[g], grid,
                                        initial_density[g]);

    const ParticleRun particles = simplified_particle_run(
        w0, gammas, r, dividend, horizon, particle_dt);
    const std::vector<double>& w_final = particles.wealth.back();
    std::size_t offset = 0;
    double after = 0.0;
    for (std::size_t g = 0; g < specs.size(); ++g) {
      std::vector<double> samples(w_final.begin() + offset,
                                  w_final.begin() + offset + counts[g]);
      offset += counts[g];
      after += specs[g].weight *
               w1_empirical_vs_density(std::move(samples), grid,
                                       final_density[g]);
    }

    table.particles.push_back(n);
    table.w1_initial.push_back(before);
    table.w1_final.push_back(after);
  }
  return table;
}

ConvergenceTable convergence_rate_table(const Grid1D& grid,
                                        std::span<const GroupSpec> specs,
                                        double r, const TimeFunction& dividend,
                                        double horizon, double particle_dt,
                                        std::span<const int> particle_counts,
                                        RngStream& rng) {
  GroupDensity initial = make_group_density(grid, specs);
  TransportRun evolved = evolve_transport(initial, dividend, r, horizon);
  std::vector<std::vector<double>> initial_density(specs.size());
  std::vector<std::vector<double>> final_density(specs.size());
  for (std::size_t g = 0; g < specs.size(); ++g) {
    initial_density[g] = initial.groups[g].density;
    final_density[g] = std::move(evolved.density.groups[g].density);
    const double m = mass(grid, final_density[g]);
    for (double& v : final_density[g]) v /= m;
  }
  return convergence_rate_table(grid, specs, initial_density, final_density, r,
                                dividend, horizon, particle_dt,
                                particle_counts, rng);
}

}  // namespace abcem::mf
