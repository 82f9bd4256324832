#include "abcem/transport.hpp"

#include <algorithm>
#include <cmath>

#include "abcem/errors.hpp"

namespace abcem::mf {

namespace {

constexpr double kCflNumber = 0.5;
constexpr double kCflSlack = 1.0 + 1e-9;

struct UpwindStep {
  std::vector<double> f;
  double loss;  // mass leaving through the domain boundaries
};

UpwindStep upwind_step(const Grid1D& grid, std::span<const double> f,
                       std::span<const double> edge_velocity, double dt) {
  const int c = grid.num_cells;
  const double dx = grid.dx();
  std::vector<double> flux(c + 1);
  for (int i = 0; i <= c; ++i) {
    const double v = edge_velocity[i];
    const double upwind =
        v >= 0.0 ? (i > 0 ? f[i - 1] : 0.0) : (i < c ? f[i] : 0.0);
    flux[i] = v * upwind;
  }
  UpwindStep out;
  out.f.resize(c);
  for (int i = 0; i < c; ++i)
    out.f[i] = f[i] - dt / dx * (flux[i + 1] - flux[i]);
  out.loss = dt * (std::max(flux[c], 0.0) - std::min(flux[0], 0.0));
  return out;
}

double group_drift_rate(double r, double gamma, double z, double a) {
  return r + gamma * z / a;
}

// Fastest drift speed across groups; velocity is rate * w, extremal at an
// end of the axis.
double max_speed(const GroupDensity& density, double z, double r, double a) {
  double speed = 0.0;
  for (const Group& g : density.groups) {
    const double rate = group_drift_rate(r, g.gamma, z, a);
    speed = std::max(speed, std::max(std::abs(rate * density.grid.x_min),
                                     std::abs(rate * density.grid.x_max)));
  }
  return speed;
}

TransportStep step_with_coefficient(const GroupDensity& density, double z,
                                    double r, double dt, double a) {
  const Grid1D& grid = density.grid;
  const double speed = max_speed(density, z, r, a);
  if (dt * speed > kCflNumber * grid.dx() * kCflSlack)
    throw cfl_error("mf_transport_step: dt exceeds the CFL bound");

  TransportStep out;
  out.density.grid = grid;
  out.density.time = density.time + dt;
  out.density.groups.reserve(density.groups.size());
  out.outflow = 0.0;
  out.coefficient = a;

  std::vector<double> velocity(grid.num_cells + 1);
  for (const Group& g : density.groups) {
    const double rate = group_drift_rate(r, g.gamma, z, a);
    for (int i = 0; i <= grid.num_cells; ++i)
      velocity[i] = rate * grid.edge(i);
    UpwindStep stepped = upwind_step(grid, g.density, velocity, dt);
    out.outflow = std::max(out.outflow, stepped.loss);
    out.density.groups.push_back({g.gamma, g.weight, std::move(stepped.f)});
  }
  return out;
}

}  // namespace

double mf_coefficient(const GroupDensity& density) {
  double a = 0.0;
  for (const Group& g : density.groups) {
    double first_moment = 0.0;
    for (int i = 0; i < density.grid.num_cells; ++i)
      first_moment += density.grid.center(i) * g.density[i];
    first_moment *= density.grid.dx();
    a += g.weight * g.gamma * (1.0 - g.gamma) * first_moment;
  }
  if (!(a > 0.0))
    throw singular_coefficient_error("mf_coefficient: A(t) must be positive");
  return a;
}

double transport_max_dt(const GroupDensity& density, double dividend_value,
                        double r, double cfl) {
  const double a = mf_coefficient(density);
  const double speed = max_speed(density, dividend_value, r, a);
  return cfl * density.grid.dx() / speed;
}

TransportStep mf_transport_step(const GroupDensity& density,
                                const TimeFunction& dividend, double r,
                                double dt) {
  const double z = dividend(density.time);
  return step_with_coefficient(density, z, r, dt, mf_coefficient(density));
}

TransportRun evolve_transport(GroupDensity density,
                              const TimeFunction& dividend, double r,
                              double horizon, double cfl,
                              double outflow_budget) {
  TransportRun out;
  out.drift_integral.assign(density.groups.size(), 0.0);
  out.outflow = 0.0;

  std::vector<double> mass_before(density.groups.size());
  const double t_end = density.time + horizon;
  while (density.time < t_end - 1e-15 * std::max(1.0, t_end)) {
    const double z = dividend(density.time);
    const double a = mf_coefficient(density);
    const double stable = cfl * density.grid.dx() / max_speed(density, z, r, a);
    const double dt = std::min(stable, t_end - density.time);

    for (std::size_t g = 0; g < density.groups.size(); ++g)
      mass_before[g] = mass(density.grid, density.groups[g].density);

    TransportStep stepped = step_with_coefficient(density, z, r, dt, a);
    out.outflow += stepped.outflow;
    if (out.outflow > outflow_budget)
      throw invalid_parameter_error(
          "evolve_transport: boundary outflow exceeds budget; enlarge x_max");

    for (std::size_t g = 0; g < density.groups.size(); ++g) {
      out.drift_integral[g] +=
          group_drift_rate(r, density.groups[g].gamma, z, a) * dt;
      const double mass_after =
          mass(stepped.density.grid, stepped.density.groups[g].density);
      // boundary loss accounted, the interior update must telescope
      out.max_step_mass_error =
          std::max(out.max_step_mass_error,
                   std::abs(mass_after - mass_before[g] + stepped.outflow) /
                       mass_before[g]);
    }
    density = std::move(stepped.density);
  }
  out.density = std::move(density);
  return out;
}

double toy_max_dt(const Grid1D& grid, std::span<const double> f, double cfl) {
  const double m = mean_of(grid, f);
  const double speed =
      std::max(std::abs(m - grid.x_min), std::abs(m - grid.x_max));
  return cfl * grid.dx() / speed;
}

std::vector<double> toy_mf_step(const Grid1D& grid, std::span<const double> f,
                                double dt) {
  const double m = mean_of(grid, f);
  std::vector<double> velocity(grid.num_cells + 1);
  double speed = 0.0;
  for (int i = 0; i <= grid.num_cells; ++i) {
    velocity[i] = m - grid.edge(i);
    speed = std::max(speed, std::abs(velocity[i]));
  }
  if (dt * speed > kCflNumber * grid.dx() * kCflSlack)
    throw cfl_error("toy_mf_step: dt exceeds the CFL bound");
  return upwind_step(grid, f, velocity, dt).f;
}

namespace {

struct LnMoments {
  double mass;
  double mean;
  double var;
};

LnMoments ln_moments(const Grid1D& grid, std::span<const double> f) {
  double m0 = 0.0, m1 = 0.0;
  for (int i = 0; i < grid.num_cells; ++i) {
    m0 += f[i];
    m1 += std::log(grid.center(i)) * f[i];
  }
  const double mean = m1 / m0;
  double m2 = 0.0;
  for (int i = 0; i < grid.num_cells; ++i) {
    const double d = std::log(grid.center(i)) - mean;
    m2 += d * d * f[i];
  }
  return {m0 * grid.dx(), mean, m2 / m0};
}

}  // namespace

AnsatzCheck lognormal_ansatz_check(const Grid1D& grid,
                                   std::span<const GroupSpec> specs, double r,
                                   const TimeFunction& dividend,
                                   double horizon) {
  GroupDensity initial = make_group_density(grid, specs);
  std::vector<double> initial_ln_mean(specs.size());
  for (std::size_t g = 0; g < specs.size(); ++g)
    initial_ln_mean[g] = ln_moments(grid, initial.groups[g].density).mean;

  TransportRun run = evolve_transport(std::move(initial), dividend, r, horizon);

  AnsatzCheck out;
  out.max_l1_residual = 0.0;
  for (std::size_t g = 0; g < run.density.groups.size(); ++g) {
    const Group& group = run.density.groups[g];
    const LnMoments moments = ln_moments(grid, group.density);
    const std::vector<double> fitted =
        lognormal_cells(grid, moments.mean, moments.var);
    double l1 = 0.0;
    for (int i = 0; i < grid.num_cells; ++i)
      l1 += std::abs(group.density[i] - moments.mass * fitted[i]);
    l1 *= grid.dx();
    out.groups.push_back({group.gamma, l1, moments.mean - initial_ln_mean[g],
                          run.drift_integral[g], moments.var});
    out.max_l1_residual = std::max(out.max_l1_residual, l1);
  }
  return out;
}

}  // namespace abcem::mf
