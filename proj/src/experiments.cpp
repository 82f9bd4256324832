#include "abcem/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "abcem/errors.hpp"
#include "abcem/parallel.hpp"
#include "abcem/particles.hpp"
#include "abcem/transport.hpp"
#include "abcem/wasserstein.hpp"

namespace abcem::experiments {

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool fraction_outside_unit(double n) {
  return n < -kFractionGuard || n > 1.0 + kFractionGuard;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (runs < 1) throw invalid_parameter_error("config: runs must be >= 1");
  if (steps < 0) throw invalid_parameter_error("config: steps must be >= 0");
  switch (kind) {
    case Kind::FwRun:
    case Kind::OuSteadyState:
      fw.validate();
      break;
    case Kind::FwStabilitySweep:
      fw.validate();
      if (sweep.sigma_f.empty() || sweep.dt.empty())
        throw invalid_parameter_error(
            "config: fw_stability_sweep needs sweep.sigma_f and sweep.dt");
      for (double s : sweep.sigma_f)
        if (!(s > 0.0))
          throw invalid_parameter_error("config: sweep.sigma_f entries > 0");
      for (double d : sweep.dt)
        if (!(d > 0.0))
          throw invalid_parameter_error("config: sweep.dt entries > 0");
      break;
    case Kind::LlsRun:
      lls.validate();
      break;
    case Kind::LlsTimescaleSweep:
      lls.validate();
      if (sweep.dt.empty() || sweep.memory_mode.empty())
        throw invalid_parameter_error(
            "config: lls_timescale_sweep needs sweep.dt and sweep.memory_mode");
      for (double d : sweep.dt)
        if (!(d > 0.0))
          throw invalid_parameter_error("config: sweep.dt entries > 0");
      break;
    case Kind::MfConvergence: {
      if (sweep.particle_counts.size() < 3)
        throw invalid_parameter_error(
            "config: mf_convergence needs sweep.N with at least 3 entries");
      int prev = 0;
      for (int n : sweep.particle_counts) {
        if (n <= prev)
          throw invalid_parameter_error("config: sweep.N must be ascending");
        prev = n;
      }
      break;
    }
  }
}

std::optional<std::size_t> detect_blowup(const fw::Trajectory& trajectory,
                                         double price_bound,
                                         double fraction_bound) {
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double p = trajectory.log_price[i];
    const double n_f = trajectory.n_f[i];
    const double n_c = trajectory.n_c[i];
    if (!std::isfinite(p) || !std::isfinite(n_f) || !std::isfinite(n_c))
      return i;
    if (std::abs(p) > price_bound) return i;
    if (n_f < -fraction_bound || n_f > 1.0 + fraction_bound) return i;
    if (n_c < -fraction_bound || n_c > 1.0 + fraction_bound) return i;
  }
  return trajectory.first_nonfinite_step;
}

double boundary_fraction(const std::vector<std::vector<double>>& gamma_matrix) {
  std::size_t total = 0;
  std::size_t at_boundary = 0;
  for (const auto& row : gamma_matrix) {
    total += row.size();
    for (double g : row)
      if (g == lls::kGammaMin || g == lls::kGammaMax) ++at_boundary;
  }
  if (total == 0)
    throw invalid_parameter_error("boundary_fraction: empty matrix");
  return static_cast<double>(at_boundary) / static_cast<double>(total);
}

fw::FwState initial_fw_state(const fw::FwParams& params) {
  fw::FwState state;
  state.log_price = params.fundamental_price;
  state.prev_log_price = params.fundamental_price;
  state.n_f = 0.5;
  state.n_c = 0.5;
  state.time = 0.0;
  return state;
}

FwRunResult run_fw(const ExperimentConfig& config) {
  config.validate();
  FwRunResult result;
  result.trajectories.resize(config.runs);
  parallel_for(config.runs, [&](std::size_t run) {
    RngStream stream(config.seed, run);
    result.trajectories[run] =
        fw::run(initial_fw_state(config.fw), config.fw, config.scheme,
                static_cast<std::size_t>(config.steps), stream);
  });
  return result;
}

BlowupReport run_fw_stability_sweep(const ExperimentConfig& config) {
  config.validate();
  BlowupReport report;

  struct SchemeRow {
    fw::Scheme scheme;
    bool clamped;
  };
  const SchemeRow rows[] = {{fw::Scheme::ExplicitEuler, false},
                            {fw::Scheme::ExplicitEuler, true},
                            {fw::Scheme::SemiImplicit, false}};

  std::size_t cell_index = 0;
  for (const SchemeRow& row : rows) {
    for (double sigma_f : config.sweep.sigma_f) {
      for (double dt : config.sweep.dt) {
        fw::FwParams params = config.fw;
        params.sigma_f = sigma_f;
        params.dt = dt;
        params.clamp_probabilities = row.clamped;

        BlowupCell cell;
        cell.scheme = row.scheme;
        cell.clamped = row.clamped;
        cell.sigma_f = sigma_f;
        cell.dt = dt;
        cell.runs = config.runs;

        std::vector<int> blowup(config.runs), nonfinite(config.runs),
            violated(config.runs);
        parallel_for(config.runs, [&](std::size_t run) {
          RngStream stream(config.seed,
                           cell_index * static_cast<std::size_t>(config.runs) +
                               run);
          const fw::Trajectory traj =
              fw::run(initial_fw_state(params), params, row.scheme,
                      static_cast<std::size_t>(config.steps), stream);
          blowup[run] = detect_blowup(traj).has_value() ? 1 : 0;
          nonfinite[run] = traj.first_nonfinite_step.has_value() ? 1 : 0;
          bool out_of_unit = false;
          for (std::size_t i = 0; i < traj.size() && !out_of_unit; ++i)
            out_of_unit = fraction_outside_unit(traj.n_f[i]) ||
                          fraction_outside_unit(traj.n_c[i]);
          violated[run] = out_of_unit ? 1 : 0;
        });
        for (int run = 0; run < config.runs; ++run) {
          cell.blowup_count += blowup[run];
          cell.nonfinite_count += nonfinite[run];
          cell.bound_violation_count += violated[run];
        }
        report.cells.push_back(cell);
        ++cell_index;
      }
    }
  }
  return report;
}

namespace {

LlsRunRecord run_single_lls(const lls::LlsParams& params, long long steps,
                            RngStream& stream) {
  LlsRunRecord record;
  lls::Simulation sim = lls::Simulation::init(params, stream);
  const auto record_state = [&](double bf) {
    record.time.push_back(sim.time());
    record.price.push_back(sim.price());
    record.dividend.push_back(sim.dividend());
    record.mean_wealth.push_back(sim.mean_wealth());
    record.boundary_frac.push_back(bf);
  };
  // initial row: the configured allocations are the standing decisions
  double initial_bf = 0.0;
  for (const lls::Agent& a : sim.agents())
    if (a.gamma == lls::kGammaMin || a.gamma == lls::kGammaMax)
      initial_bf += 1.0;
  record_state(initial_bf / static_cast<double>(sim.agents().size()));

  for (long long k = 0; k < steps; ++k) {
    try {
      sim.step(stream);
    } catch (const simulation_error& err) {
      record.error = err.what();
      break;
    }
    double bf = 0.0;
    for (double g : sim.decisions())
      if (g == lls::kGammaMin || g == lls::kGammaMax) bf += 1.0;
    record_state(bf / static_cast<double>(sim.decisions().size()));
  }
  record.max_clearance_residual = sim.max_clearance_residual();
  return record;
}

}  // namespace

LlsRunResult run_lls(const ExperimentConfig& config) {
  config.validate();
  LlsRunResult result;
  result.runs.resize(config.runs);
  parallel_for(config.runs, [&](std::size_t run) {
    RngStream stream(config.seed, run);
    result.runs[run] = run_single_lls(config.lls, config.steps, stream);
  });
  return result;
}

LlsSweepReport run_lls_timescale_sweep(const ExperimentConfig& config) {
  config.validate();
  LlsSweepReport report;
  report.horizon = static_cast<double>(config.steps) * config.lls.dt;

  std::size_t cell_index = 0;
  for (lls::MemoryMode mode : config.sweep.memory_mode) {
    for (double dt : config.sweep.dt) {
      lls::LlsParams params = config.lls;
      params.dt = dt;
      params.memory_mode = mode;

      LlsSweepCell cell;
      cell.mode = mode;
      cell.dt = dt;
      cell.steps = std::llround(report.horizon / dt);
      cell.warmup = cell.steps / 10;

      struct RunOutcome {
        bool ok = false;
        double boundary_fraction = 0.0;
        double max_residual = 0.0;
      };
      std::vector<RunOutcome> outcomes(config.runs);
      parallel_for(config.runs, [&](std::size_t run) {
        RngStream stream(config.seed,
                         cell_index * static_cast<std::size_t>(config.runs) +
                             run);
        try {
          lls::Simulation sim = lls::Simulation::init(params, stream);
          long long counted = 0;
          long long at_boundary = 0;
          for (long long k = 1; k <= cell.steps; ++k) {
            sim.step(stream);
            if (k <= cell.warmup) continue;
            for (double g : sim.decisions()) {
              ++counted;
              if (g == lls::kGammaMin || g == lls::kGammaMax) ++at_boundary;
            }
          }
          outcomes[run].ok = true;
          outcomes[run].boundary_fraction =
              counted == 0 ? 0.0
                           : static_cast<double>(at_boundary) /
                                 static_cast<double>(counted);
          outcomes[run].max_residual = sim.max_clearance_residual();
        } catch (const simulation_error&) {
          outcomes[run].ok = false;
        }
      });

      for (const RunOutcome& outcome : outcomes) {
        if (!outcome.ok) {
          ++cell.errored;
          continue;
        }
        if (cell.completed == 0) {
          cell.boundary_fraction.min = outcome.boundary_fraction;
          cell.boundary_fraction.max = outcome.boundary_fraction;
        }
        ++cell.completed;
        cell.boundary_fraction.mean += outcome.boundary_fraction;
        cell.boundary_fraction.min =
            std::min(cell.boundary_fraction.min, outcome.boundary_fraction);
        cell.boundary_fraction.max =
            std::max(cell.boundary_fraction.max, outcome.boundary_fraction);
        cell.max_clearance_residual =
            std::max(cell.max_clearance_residual, outcome.max_residual);
      }
      if (cell.completed > 0) cell.boundary_fraction.mean /= cell.completed;
      cell.boundary_fraction.count = cell.completed;
      report.cells.push_back(cell);
      ++cell_index;
    }
  }
  return report;
}

ConvergenceReport run_mf_convergence(const ExperimentConfig& config) {
  config.validate();
  const MfStudySpec& study = config.mf_study;
  const auto dividend = [&study](double) { return study.dividend; };

  // The limiting density is seed-free; solve it once and share it across
  // every replicate and head count.
  mf::GroupDensity initial = mf::make_group_density(study.grid, study.groups);
  mf::TransportRun evolved = mf::evolve_transport(
      initial, dividend, study.interest_rate, study.horizon);

  std::vector<std::vector<double>> final_density(study.groups.size());
  std::vector<std::vector<double>> initial_density(study.groups.size());
  for (std::size_t g = 0; g < study.groups.size(); ++g) {
    initial_density[g] = initial.groups[g].density;
    final_density[g] = evolved.density.groups[g].density;
    const double m = mf::mass(study.grid, final_density[g]);
    for (double& v : final_density[g]) v /= m;
  }

  ConvergenceReport report;
  report.final_density = evolved.density;
  for (std::size_t g = 0; g < report.final_density.groups.size(); ++g)
    report.final_density.groups[g].density = final_density[g];
  const int replicates = config.runs;
  const std::size_t n_rows = config.sweep.particle_counts.size();
  report.w1_initial.assign(n_rows, std::vector<double>(replicates));
  report.w1_final.assign(n_rows, std::vector<double>(replicates));

  parallel_for(replicates, [&](std::size_t rep) {
    RngStream stream(config.seed, rep);
    const mf::ConvergenceTable table = mf::convergence_rate_table(
        study.grid, study.groups, initial_density, final_density,
        study.interest_rate, dividend, study.horizon, study.particle_dt,
        config.sweep.particle_counts, stream);
    for (std::size_t row = 0; row < n_rows; ++row) {
      report.w1_initial[row][rep] = table.w1_initial[row];
      report.w1_final[row][rep] = table.w1_final[row];
    }
  });

  for (std::size_t row = 0; row < n_rows; ++row)
    report.rows.push_back({config.sweep.particle_counts[row],
                           median(report.w1_initial[row]),
                           median(report.w1_final[row])});
  return report;
}

OuReport run_ou_steadystate(const ExperimentConfig& config) {
  config.validate();
  constexpr int kGridCells = 8192;
  constexpr std::size_t kMcSteps = 1000000;
  constexpr std::size_t kMcBurnIn = 20000;
  constexpr int kNullReplicates = 200;

  OuReport report;
  report.spec = mf::ou_spec_from_fw(config.fw);
  const mf::GaussianMoments analytic = mf::ou_stationary_gaussian(report.spec);
  report.analytic_mean = analytic.mean;
  report.analytic_variance = analytic.variance;
  report.alt_exponent_center = 0.5 * report.spec.mean;

  const double sd = std::sqrt(analytic.variance);
  report.grid = {analytic.mean - 8.0 * sd, analytic.mean + 8.0 * sd,
                 kGridCells};
  report.analytic_density =
      mf::gaussian_cells(report.grid, analytic.mean, analytic.variance);
  report.numeric_density = mf::ou_steady_state_numeric(report.spec, report.grid);

  double l1 = 0.0;
  for (int i = 0; i < kGridCells; ++i)
    l1 += std::abs(report.numeric_density[i] - report.analytic_density[i]);
  report.l1_analytic_vs_numeric = l1 * report.grid.dx();

  RngStream mc_stream(config.seed, 0);
  const std::vector<double> samples =
      mf::fw_frozen_n_simulate(config.fw, 0.0, kMcSteps, kMcBurnIn, mc_stream);
  report.mc_samples = samples.size();
  report.mc_w1 =
      mf::w1_empirical_vs_density(samples, report.grid, report.analytic_density);

  double sum = 0.0;
  for (double p : samples) sum += p;
  report.mc_mean = sum / static_cast<double>(samples.size());

  // The frozen-fraction walk is an AR(1) chain; its integrated
  // autocorrelation time is (1 + rho)/(1 - rho) with rho = 1 - rate dt.
  const double rho = 1.0 - report.spec.drift_rate * config.fw.dt;
  const double tau = (1.0 + rho) / (1.0 - rho);
  report.effective_sample_size = static_cast<std::size_t>(
      std::max(2.0, static_cast<double>(samples.size()) / tau));
  report.mc_mean_stderr =
      sd / std::sqrt(static_cast<double>(report.effective_sample_size));

  // Null distribution of the W1 statistic for an exact sampler of the
  // stationary law at the effective sample size.
  std::vector<double> null_values(kNullReplicates);
  parallel_for(kNullReplicates, [&](std::size_t rep) {
    RngStream stream(config.seed, 1000 + rep);
    std::vector<double> draws(report.effective_sample_size);
    for (double& d : draws) d = stream.normal(analytic.mean, sd);
    null_values[rep] =
        mf::w1_empirical_vs_density(std::move(draws), report.grid,
                                    report.analytic_density);
  });
  double null_mean = 0.0;
  for (double v : null_values) null_mean += v;
  null_mean /= kNullReplicates;
  double null_var = 0.0;
  for (double v : null_values)
    null_var += (v - null_mean) * (v - null_mean);
  null_var /= (kNullReplicates - 1);
  report.mc_w1_null_mean = null_mean;
  report.mc_w1_null_sd = std::sqrt(null_var);
  return report;
}

}  // namespace abcem::experiments
