#pragma once

#include <functional>
#include <span>
#include <vector>

#include "abcem/grid.hpp"
#include "abcem/rng.hpp"

namespace abcem::mf {

using TimeFunction = std::function<double(double)>;

// Nonlocal drift coefficient A(t) = sum_g w_g gamma_g (1 - gamma_g) E[w]_g.
// Throws singular_coefficient_error if the result is not positive.
double mf_coefficient(const GroupDensity& density);

// Largest stable step for the group transport at the current state,
// CFL number `cfl` against the fastest drift speed on the grid.
double transport_max_dt(const GroupDensity& density, double dividend_value,
                        double r, double cfl = 0.5);

struct TransportStep {
  GroupDensity density;
  double outflow;      // largest per-group mass advected past x_max
  double coefficient;  // A(t) the step was driven with
};

// One conservative upwind finite-volume step of
//   d_t f_g + d_w([r w + gamma_g w Z(t)/A(t)] f_g) = 0
// per group, A(t) frozen from the pre-step density, zero-inflow
// boundaries. Throws cfl_error when dt exceeds the CFL bound.
TransportStep mf_transport_step(const GroupDensity& density,
                                const TimeFunction& dividend, double r,
                                double dt);

struct TransportRun {
  GroupDensity density;
  double outflow;                      // worst per-group cumulative outflow
  std::vector<double> drift_integral;  // per group: int (r + gamma Z/A) dt
  double max_step_mass_error = 0.0;    // worst per-step conservation defect
};

// Advance to `horizon` with CFL-limited steps, tracking the accumulated
// drift integral per group. Throws if cumulative boundary outflow exceeds
// `outflow_budget` (the grid was sized too small).
TransportRun evolve_transport(GroupDensity density,
                              const TimeFunction& dividend, double r,
                              double horizon, double cfl = 0.5,
                              double outflow_budget = 1e-6);

// One upwind step of the mean-reverting toy transport
//   d_t f + d_w([m(t) - w] f) = 0,   m(t) the current mean,
// on a signed axis. Same CFL contract as above.
std::vector<double> toy_mf_step(const Grid1D& grid, std::span<const double> f,
                                double dt);
double toy_max_dt(const Grid1D& grid, std::span<const double> f,
                  double cfl = 0.5);

struct AnsatzGroupFit {
  double gamma;
  double l1_residual;     // L1 distance between PDE solution and fitted profile
  double fitted_shift;    // ln-mean displacement measured from the solution
  double predicted_shift; // int_0^T (r + gamma Z/A) dt
  double ln_variance;     // ln-w variance of the evolved solution
};

struct AnsatzCheck {
  std::vector<AnsatzGroupFit> groups;
  double max_l1_residual;
};

// Evolve log-normal initial data to `horizon`, refit the log-normal family
// by matching the first two ln-w moments, and compare: the profile should
// persist and its ln-mean should move by the accumulated drift integral.
AnsatzCheck lognormal_ansatz_check(const Grid1D& grid,
                                   std::span<const GroupSpec> specs, double r,
                                   const TimeFunction& dividend,
                                   double horizon);

struct ConvergenceTable {
  std::vector<int> particles;
  std::vector<double> w1_initial;  // weighted per-group distance at t = 0
  std::vector<double> w1_final;    // same at the horizon
};

// One replicate of the particles-vs-density convergence experiment: for each
// head count, sample initial wealths from the group profiles, integrate the
// interacting system to the horizon, and report the weight-averaged W1
// distance to the transported density (solved once, shared across counts).
ConvergenceTable convergence_rate_table(const Grid1D& grid,
                                        std::span<const GroupSpec> specs,
                                        double r, const TimeFunction& dividend,
                                        double horizon, double particle_dt,
                                        std::span<const int> particle_counts,
                                        RngStream& rng);

// Same measurement against externally supplied normalized group densities,
// so ensembles can share one transport solve across replicates.
ConvergenceTable convergence_rate_table(
    const Grid1D& grid, std::span<const GroupSpec> specs,
    const std::vector<std::vector<double>>& initial_density,
    const std::vector<std::vector<double>>& final_density, double r,
    const TimeFunction& dividend, double horizon, double particle_dt,
    std::span<const int> particle_counts, RngStream& rng);

}  // namespace abcem::mf
