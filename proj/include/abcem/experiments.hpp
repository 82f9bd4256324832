#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abcem/fw.hpp"
#include "abcem/grid.hpp"
#include "abcem/lls.hpp"
#include "abcem/ou.hpp"

namespace abcem::experiments {

enum class Kind {
  FwRun,
  FwStabilitySweep,
  LlsRun,
  LlsTimescaleSweep,
  MfConvergence,
  OuSteadyState,
};

struct SweepAxes {
  std::vector<double> sigma_f;
  std::vector<double> dt;
  std::vector<lls::MemoryMode> memory_mode;
  std::vector<int> particle_counts;
};

// Settings of the built-in mean-field convergence and ansatz studies:
// three equal-weight allocation groups with unit ln-variance initial data,
// constant dividend, horizon one.
struct MfStudySpec {
  std::vector<mf::GroupSpec> groups = {{0.2, 1.0 / 3.0, 0.0, 1.0},
                                       {0.4, 1.0 / 3.0, 0.0, 1.0},
                                       {0.6, 1.0 / 3.0, 0.0, 1.0}};
  double interest_rate = 0.04;
  double dividend = 0.1;
  double horizon = 1.0;
  double particle_dt = 1e-3;
  mf::Grid1D grid{std::exp(-4.0), std::exp(5.5), 8192};
};

struct ExperimentConfig {
  Kind kind = Kind::FwRun;
  std::string preset;  // name the config was expanded from, "" if none
  fw::FwParams fw;
  fw::Scheme scheme = fw::Scheme::ExplicitEuler;
  lls::LlsParams lls;
  long long steps = 20000;
  std::uint64_t seed = 1;
  int runs = 1;
  SweepAxes sweep;
  MfStudySpec mf_study;
  std::string out = "out";

  void validate() const;
};

// Blow-up detection thresholds: decades beyond any legitimate dynamics,
// crossed within a few steps of onset.
inline constexpr double kPriceBound = 1e6;
inline constexpr double kFractionBound = 10.0;

// [0,1] membership for fraction bookkeeping carries a one-ulp-scale guard
// so rounding at the interval ends is not reported as a model violation.
inline constexpr double kFractionGuard = 1e-12;

// First step at which the trajectory is non-finite, |P| exceeds
// price_bound, or a fraction leaves [-fraction_bound, 1 + fraction_bound].
std::optional<std::size_t> detect_blowup(const fw::Trajectory& trajectory,
                                         double price_bound = kPriceBound,
                                         double fraction_bound = kFractionBound);

// Share of allocation decisions sitting exactly on the 0.01 / 0.99 bounds.
double boundary_fraction(const std::vector<std::vector<double>>& gamma_matrix);

struct SummaryStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

struct FwRunResult {
  std::vector<fw::Trajectory> trajectories;  // one per run
};

struct BlowupCell {
  fw::Scheme scheme;
  bool clamped;
  double sigma_f;
  double dt;
  int runs = 0;
  int blowup_count = 0;           // detect_blowup fired
  int nonfinite_count = 0;        // trajectory reached a non-finite value
  int bound_violation_count = 0;  // some fraction left [0,1]

  double blowup_rate() const { return static_cast<double>(blowup_count) / runs; }
  double bound_violation_rate() const {
    return static_cast<double>(bound_violation_count) / runs;
  }
};

struct BlowupReport {
  double price_bound = kPriceBound;
  double fraction_bound = kFractionBound;
  std::vector<BlowupCell> cells;
};

struct LlsRunRecord {
  std::vector<double> time;
  std::vector<double> price;
  std::vector<double> dividend;
  std::vector<double> mean_wealth;
  std::vector<double> boundary_frac;  // per-step share of boundary decisions
  std::optional<std::string> error;   // run aborted here if set
  double max_clearance_residual = 0.0;
};

struct LlsRunResult {
  std::vector<LlsRunRecord> runs;
};

struct LlsSweepCell {
  lls::MemoryMode mode;
  double dt;
  long long steps = 0;
  long long warmup = 0;  // leading steps discarded: floor(0.1 * steps)
  int completed = 0;
  int errored = 0;
  SummaryStats boundary_fraction;     // over completed runs
  double max_clearance_residual = 0;  // relative, over completed runs
};

struct LlsSweepReport {
  double horizon = 0.0;  // shared time span; steps per cell = horizon / dt
  std::vector<LlsSweepCell> cells;
};

struct ConvergenceRow {
  int particles;
  double w1_initial_median;
  double w1_final_median;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<std::vector<double>> w1_initial;  // [row][replicate]
  std::vector<std::vector<double>> w1_final;
  mf::GroupDensity final_density;  // limiting density at the horizon
};

struct OuReport {
  mf::OuSpec spec;
  double analytic_mean = 0.0;
  double analytic_variance = 0.0;
  double l1_analytic_vs_numeric = 0.0;
  double mc_w1 = 0.0;
  double mc_w1_null_mean = 0.0;  // iid resampling at the effective size
  double mc_w1_null_sd = 0.0;
  std::size_t mc_samples = 0;
  std::size_t effective_sample_size = 0;
  double mc_mean = 0.0;
  double mc_mean_stderr = 0.0;
  // A quadratic-exponent ansatz exp{-(rate/sigma^2)(p^2 - pF)} would center
  // at F/2; the steady-state equation centers at F. Reported side by side,
  // the solve being authoritative.
  double alt_exponent_center = 0.0;
  mf::Grid1D grid;
  std::vector<double> numeric_density;
  std::vector<double> analytic_density;
};

FwRunResult run_fw(const ExperimentConfig& config);
BlowupReport run_fw_stability_sweep(const ExperimentConfig& config);
LlsRunResult run_lls(const ExperimentConfig& config);
LlsSweepReport run_lls_timescale_sweep(const ExperimentConfig& config);
ConvergenceReport run_mf_convergence(const ExperimentConfig& config);
OuReport run_ou_steadystate(const ExperimentConfig& config);

// Initial market state shared by the fw experiments: price at the
// fundamental value, groups balanced.
fw::FwState initial_fw_state(const fw::FwParams& params);

}  // namespace abcem::experiments
