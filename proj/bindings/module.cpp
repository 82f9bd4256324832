#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "abcem/config.hpp"
#include "abcem/experiments.hpp"
#include "abcem/fw.hpp"
#include "abcem/lls.hpp"
#include "abcem/ou.hpp"
#include "abcem/output.hpp"
#include "abcem/rng.hpp"
#include "abcem/wasserstein.hpp"

namespace py = pybind11;

using namespace abcem;

namespace {

py::dict trajectory_to_dict(const fw::Trajectory& traj) {
  py::dict out;
  out["t"] = traj.time;
  out["P"] = traj.log_price;
  out["n_f"] = traj.n_f;
  out["n_c"] = traj.n_c;
  out["first_bad_step"] = traj.first_nonfinite_step
                              ? py::object(py::int_(*traj.first_nonfinite_step))
                              : py::object(py::none());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "simulation lab for agent-based market models";
  m.attr("__version__") = cli::kVersion;

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("run_index") = 0)
      .def("uniform", &RngStream::uniform, py::arg("lo"), py::arg("hi"))
      .def("normal", &RngStream::normal, py::arg("mean"), py::arg("stddev"))
      .def("standard_normal", &RngStream::standard_normal)
      .def_property_readonly("draw_count", &RngStream::draw_count);

  py::enum_<fw::Scheme>(m, "Scheme")
      .value("EXPLICIT_EULER", fw::Scheme::ExplicitEuler)
      .value("SEMI_IMPLICIT", fw::Scheme::SemiImplicit);

  py::class_<fw::FwParams>(m, "FwParams")
      .def(py::init<>())
      .def_readwrite("phi", &fw::FwParams::phi)
      .def_readwrite("chi", &fw::FwParams::chi)
      .def_readwrite("alpha_p", &fw::FwParams::alpha_p)
      .def_readwrite("alpha_h", &fw::FwParams::alpha_h)
      .def_readwrite("alpha_m", &fw::FwParams::alpha_m)
      .def_readwrite("sigma_f", &fw::FwParams::sigma_f)
      .def_readwrite("sigma_c", &fw::FwParams::sigma_c)
      .def_readwrite("nu", &fw::FwParams::nu)
      .def_readwrite("fundamental_price", &fw::FwParams::fundamental_price)
      .def_readwrite("mu", &fw::FwParams::mu)
      .def_readwrite("dt", &fw::FwParams::dt)
      .def_readwrite("clamp_probabilities", &fw::FwParams::clamp_probabilities);

  m.def(
      "fw_run",
      [](const fw::FwParams& params, fw::Scheme scheme, std::size_t steps,
         std::uint64_t seed, std::uint64_t run_index) {
        RngStream stream(seed, run_index);
        return trajectory_to_dict(fw::run(experiments::initial_fw_state(params),
                                          params, scheme, steps, stream));
      },
      py::arg("params"), py::arg("scheme"), py::arg("steps"), py::arg("seed"),
      py::arg("run_index") = 0,
      "Simulate the two-group market model; returns the trajectory columns.");

  m.def("switching_index",
        [](double log_price, double prev_log_price, double n_f, double n_c,
           const fw::FwParams& params) {
          return fw::switching_index({log_price, prev_log_price, n_f, n_c, 0.0},
                                     params);
        });

  m.def("optimal_gamma",
        [](const std::vector<double>& history, double r, double dt,
           double prev_gamma) {
          return lls::optimal_gamma(history, r, dt, prev_gamma);
        },
        py::arg("history"), py::arg("r"), py::arg("dt"), py::arg("prev_gamma"),
        "Expected-log-utility maximizer over the feasible allocation range.");

  m.def(
      "lls_run",
      [](const std::string& preset, long long steps, std::uint64_t seed,
         double dt, const std::string& memory_mode) {
        experiments::ExperimentConfig config = cli::preset_config(preset);
        config.steps = steps;
        config.seed = seed;
        config.runs = 1;
        if (dt > 0.0) config.lls.dt = dt;
        if (memory_mode == "fixed")
          config.lls.memory_mode = lls::MemoryMode::Fixed;
        else if (memory_mode == "scaled")
          config.lls.memory_mode = lls::MemoryMode::Scaled;
        const experiments::LlsRunResult result = experiments::run_lls(config);
        const experiments::LlsRunRecord& record = result.runs.front();
        py::dict out;
        out["t"] = record.time;
        out["S"] = record.price;
        out["Z"] = record.dividend;
        out["mean_w"] = record.mean_wealth;
        out["boundary_frac"] = record.boundary_frac;
        out["max_clearance_residual"] = record.max_clearance_residual;
        out["error"] = record.error ? py::object(py::str(*record.error))
                                    : py::object(py::none());
        return out;
      },
      py::arg("preset") = "lls-basic", py::arg("steps") = 200,
      py::arg("seed") = 1, py::arg("dt") = 0.0, py::arg("memory_mode") = "",
      "Run the wealth/clearance market model from a named preset.");

  m.def("w1_sorted", &mf::w1_sorted, py::arg("a"), py::arg("b"),
        "Exact 1-D Wasserstein-1 distance between two sample sets.");

  m.def(
      "w1_empirical_vs_density",
      [](std::vector<double> samples, double x_min, double x_max,
         const std::vector<double>& density) {
        const mf::Grid1D grid{x_min, x_max, static_cast<int>(density.size())};
        return mf::w1_empirical_vs_density(std::move(samples), grid, density);
      },
      py::arg("samples"), py::arg("x_min"), py::arg("x_max"),
      py::arg("density"));

  m.def("ou_stationary_moments", [](const fw::FwParams& params) {
    const mf::GaussianMoments moments =
        mf::ou_stationary_gaussian(mf::ou_spec_from_fw(params));
    return py::make_tuple(moments.mean, moments.variance);
  });

  m.def(
      "fw_frozen_n_simulate",
      [](const fw::FwParams& params, double n_fixed, std::size_t steps,
         std::size_t burn_in, std::uint64_t seed) {
        RngStream stream(seed, 0);
        return mf::fw_frozen_n_simulate(params, n_fixed, steps, burn_in,
                                        stream);
      },
      py::arg("params"), py::arg("n_fixed") = 0.0, py::arg("steps") = 100000,
      py::arg("burn_in") = 10000, py::arg("seed") = 1);

  m.def("preset_config_json",
        [](const std::string& name) {
          return cli::config_to_json(cli::preset_config(name));
        },
        py::arg("name"));

  m.def("list_experiments", &cli::experiment_names);
  m.def("list_presets", &cli::preset_names);

  m.def(
      "run_experiment_json",
      [](const std::string& config_json, const std::string& out_dir) {
        const experiments::ExperimentConfig config =
            cli::parse_config(config_json);
        return cli::run_experiment(config, out_dir).string();
      },
      py::arg("config_json"), py::arg("out_dir"),
      "Parse a config, run it, and write CSV + metadata into out_dir.");
}
