#include <doctest.h>

#include <cmath>
#include <vector>

#include "abcem/config.hpp"
#include "abcem/errors.hpp"
#include "abcem/experiments.hpp"

using namespace abcem;
using experiments::ExperimentConfig;
using experiments::Kind;

namespace {

fw::Trajectory make_trajectory(const std::vector<double>& prices,
                               const std::vector<double>& n_f) {
  fw::Trajectory t;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    t.time.push_back(static_cast<double>(i));
    t.log_price.push_back(prices[i]);
    t.n_f.push_back(n_f[i]);
    t.n_c.push_back(1.0 - n_f[i]);
  }
  return t;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("blow-up detection") {
  SUBCASE("clean trajectory") {
    const fw::Trajectory t = make_trajectory({1.0, 1.1, 0.9}, {0.5, 0.6, 0.4});
    CHECK(!experiments::detect_blowup(t).has_value());
  }
  SUBCASE("non-finite price") {
    fw::Trajectory t = make_trajectory({1.0, 1.1, 0.9}, {0.5, 0.6, 0.4});
    t.log_price[2] = std::nan("");
    CHECK(experiments::detect_blowup(t) == 2);
  }
  SUBCASE("price bound") {
    const fw::Trajectory t = make_trajectory({1.0, 2e6}, {0.5, 0.5});
    CHECK(experiments::detect_blowup(t) == 1);
  }
  SUBCASE("fraction bound") {
    const fw::Trajectory t = make_trajectory({1.0, 1.0, 1.0}, {0.5, 12.0, 0.5});
    CHECK(experiments::detect_blowup(t) == 1);
  }
  SUBCASE("early-stopped trajectory reports its truncation step") {
    fw::Trajectory t = make_trajectory({1.0, 1.1}, {0.5, 0.5});
    t.first_nonfinite_step = 2;
    CHECK(experiments::detect_blowup(t) == 2);
  }
}

TEST_CASE("boundary fraction counts exact boundary decisions") {
  CHECK(experiments::boundary_fraction({{0.01, 0.01}, {0.01}}) == 1.0);
  CHECK(experiments::boundary_fraction({{0.5, 0.99}, {0.5, 0.99}}) == 0.5);
  CHECK(experiments::boundary_fraction({{0.98999999}}) == 0.0);
  CHECK_THROWS_AS(experiments::boundary_fraction({}),
                  abcem::invalid_parameter_error);
}

TEST_CASE("market state starts balanced at the fundamental price") {
  const fw::FwParams p;
  const fw::FwState s = experiments::initial_fw_state(p);
  CHECK(s.log_price == p.fundamental_price);
  CHECK(s.prev_log_price == p.fundamental_price);
  CHECK(s.n_f == 0.5);
  CHECK(s.n_c == 0.5);
}

TEST_CASE("ensemble runs are reproducible") {
  ExperimentConfig config = cli::preset_config("fw-basic");
  config.steps = 300;
  config.runs = 3;
  config.seed = 99;
  const experiments::FwRunResult a = experiments::run_fw(config);
  const experiments::FwRunResult b = experiments::run_fw(config);
  REQUIRE(a.trajectories.size() == 3);
  for (int run = 0; run < 3; ++run) {
    CHECK(a.trajectories[run].log_price == b.trajectories[run].log_price);
    CHECK(a.trajectories[run].n_f == b.trajectories[run].n_f);
  }
  // distinct runs follow distinct noise
  CHECK(a.trajectories[0].log_price[10] != a.trajectories[1].log_price[10]);
}

TEST_CASE("stability sweep covers the three scheme rows") {
  ExperimentConfig config = cli::preset_config("fw-basic");
  config.kind = Kind::FwStabilitySweep;
  config.steps = 400;
  config.runs = 4;
  config.sweep.sigma_f = {0.79};
  config.sweep.dt = {1.0};
  const experiments::BlowupReport report =
      experiments::run_fw_stability_sweep(config);
  REQUIRE(report.cells.size() == 3);
  for (const experiments::BlowupCell& cell : report.cells) {
    CHECK(cell.runs == 4);
    CHECK(cell.blowup_count >= cell.nonfinite_count);
  }
  // the semi-implicit row cannot leave the unit interval
  CHECK(report.cells[2].scheme == fw::Scheme::SemiImplicit);
  CHECK(report.cells[2].bound_violation_count == 0);
}

TEST_CASE("single-market runs record their time series") {
  ExperimentConfig config = cli::preset_config("lls-basic");
  config.steps = 20;
  config.runs = 2;
  const experiments::LlsRunResult result = experiments::run_lls(config);
  REQUIRE(result.runs.size() == 2);
  for (const experiments::LlsRunRecord& record : result.runs) {
    CHECK(!record.error.has_value());
    CHECK(record.time.size() == 21);
    CHECK(record.boundary_frac.front() == 0.0);  // configured start is interior
    CHECK(record.max_clearance_residual <= 1e-8);
    for (double s : record.price) CHECK(s > 0.0);
  }
}

TEST_CASE("timescale sweep aggregates completed runs") {
  ExperimentConfig config = cli::preset_config("lls-basic");
  config.kind = Kind::LlsTimescaleSweep;
  config.steps = 50;
  config.runs = 3;
  config.sweep.dt = {1.0};
  config.sweep.memory_mode = {lls::MemoryMode::Scaled, lls::MemoryMode::Fixed};
  const experiments::LlsSweepReport report =
      experiments::run_lls_timescale_sweep(config);
  REQUIRE(report.cells.size() == 2);
  CHECK(report.horizon == 50.0);
  for (const experiments::LlsSweepCell& cell : report.cells) {
    CHECK(cell.completed == 3);
    CHECK(cell.errored == 0);
    CHECK(cell.steps == 50);
    CHECK(cell.warmup == 5);
    CHECK(cell.boundary_fraction.min <= cell.boundary_fraction.mean);
    CHECK(cell.boundary_fraction.mean <= cell.boundary_fraction.max);
    CHECK(cell.boundary_fraction.max <= 1.0);
    CHECK(cell.max_clearance_residual <= 1e-8);
  }
  // at dt = 1 the two memory modes see identical lookbacks and histories
  CHECK(report.cells[0].boundary_fraction.mean ==
        doctest::Approx(report.cells[1].boundary_fraction.mean));
}

TEST_CASE("convergence study reports both time points per head count") {
  ExperimentConfig config;
  config.kind = Kind::MfConvergence;
  config.seed = 5;
  config.runs = 4;
  config.sweep.particle_counts = {16, 64, 256};
  const experiments::ConvergenceReport report =
      experiments::run_mf_convergence(config);
  REQUIRE(report.rows.size() == 3);
  for (std::size_t row = 0; row < report.rows.size(); ++row) {
    CHECK(report.rows[row].w1_initial_median > 0.0);
    CHECK(report.rows[row].w1_final_median > 0.0);
    CHECK(std::isfinite(report.rows[row].w1_initial_median));
    CHECK(std::isfinite(report.rows[row].w1_final_median));
    CHECK(report.w1_initial[row].size() == 4);
    CHECK(report.w1_final[row].size() == 4);
  }
  // sampling error shrinks over a 16x head-count increase even at this size
  CHECK(report.rows[2].w1_final_median < report.rows[0].w1_final_median);
}

TEST_CASE("config validation catches missing sweep axes") {
  ExperimentConfig config = cli::preset_config("fw-basic");
  config.kind = Kind::FwStabilitySweep;
  CHECK_THROWS_AS(config.validate(), abcem::invalid_parameter_error);
  config.sweep.sigma_f = {0.79};
  config.sweep.dt = {1.0};
  CHECK_NOTHROW(config.validate());

  ExperimentConfig mf_config;
  mf_config.kind = Kind::MfConvergence;
  mf_config.sweep.particle_counts = {100, 50, 200};  // not ascending
  CHECK_THROWS_AS(mf_config.validate(), abcem::invalid_parameter_error);
}

}  // TEST_SUITE
