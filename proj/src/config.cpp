#include "abcem/config.hpp"

#include <algorithm>

#include <json.hpp>

#include "abcem/errors.hpp"

namespace abcem::cli {

using experiments::ExperimentConfig;
using experiments::Kind;
using nlohmann::json;

namespace {

struct KindEntry {
  Kind kind;
  const char* name;
};

constexpr KindEntry kKinds[] = {
    {Kind::FwRun, "fw_run"},
    {Kind::FwStabilitySweep, "fw_stability_sweep"},
    {Kind::LlsRun, "lls_run"},
    {Kind::LlsTimescaleSweep, "lls_timescale_sweep"},
    {Kind::MfConvergence, "mf_convergence"},
    {Kind::OuSteadyState, "ou_steadystate"},
};

bool is_fw_kind(Kind kind) {
  return kind == Kind::FwRun || kind == Kind::FwStabilitySweep ||
         kind == Kind::OuSteadyState;
}

bool is_lls_kind(Kind kind) {
  return kind == Kind::LlsRun || kind == Kind::LlsTimescaleSweep;
}

Kind kind_from_name(const std::string& name) {
  for (const KindEntry& entry : kKinds)
    if (name == entry.name) return entry.kind;
  throw invalid_parameter_error("config: unknown experiment \"" + name + "\"");
}

[[noreturn]] void bad_key(const std::string& key, const char* what) {
  throw invalid_parameter_error("config: key \"" + key + "\" " + what);
}

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad_key(key, "must be a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad_key(key, "must be an integer");
  return j.get<long long>();
}

std::string as_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad_key(key, "must be a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) bad_key(key, "must be a boolean");
  return j.get<bool>();
}

lls::MemoryMode memory_mode_from_name(const std::string& value,
                                      const std::string& key) {
  if (value == "scaled") return lls::MemoryMode::Scaled;
  if (value == "fixed") return lls::MemoryMode::Fixed;
  bad_key(key, "must be \"scaled\" or \"fixed\"");
}

const char* memory_mode_name(lls::MemoryMode mode) {
  return mode == lls::MemoryMode::Scaled ? "scaled" : "fixed";
}

void apply_scheme(ExperimentConfig& config, const std::string& value) {
  if (value == "explicit") {
    config.scheme = fw::Scheme::ExplicitEuler;
    config.fw.clamp_probabilities = false;
  } else if (value == "explicit_clamped") {
    config.scheme = fw::Scheme::ExplicitEuler;
    config.fw.clamp_probabilities = true;
  } else if (value == "semi_implicit") {
    config.scheme = fw::Scheme::SemiImplicit;
    config.fw.clamp_probabilities = false;
  } else {
    bad_key("scheme",
            "must be \"explicit\", \"explicit_clamped\" or \"semi_implicit\"");
  }
}

void apply_fw_override(fw::FwParams& p, const std::string& key,
                       const json& value) {
  const std::string full = "override." + key;
  if (key == "phi") p.phi = as_number(value, full);
  else if (key == "chi") p.chi = as_number(value, full);
  else if (key == "alpha_p" || key == "alpha_0")
    p.alpha_p = as_number(value, full);
  else if (key == "alpha_h") p.alpha_h = as_number(value, full);
  else if (key == "alpha_m") p.alpha_m = as_number(value, full);
  else if (key == "sigma_f") p.sigma_f = as_number(value, full);
  else if (key == "sigma_c") p.sigma_c = as_number(value, full);
  else if (key == "nu") p.nu = as_number(value, full);
  else if (key == "fundamental_price")
    p.fundamental_price = as_number(value, full);
  else if (key == "mu") p.mu = as_number(value, full);
  else if (key == "dt") p.dt = as_number(value, full);
  else if (key == "clamp_probabilities")
    p.clamp_probabilities = as_bool(value, full);
  else bad_key(full, "is not a Franke-Westerhoff parameter");
}

void apply_lls_override(lls::LlsParams& p, const std::string& key,
                        const json& value) {
  const std::string full = "override." + key;
  if (key == "num_agents") {
    const long long n = as_integer(value, full);
    p.num_agents = static_cast<int>(n);
    if (static_cast<std::size_t>(n) != p.base_memory.size()) {
      // resizing keeps a uniform lookback pattern; anything else needs an
      // explicit base_memory override
      const bool uniform =
          !p.base_memory.empty() &&
          std::all_of(p.base_memory.begin(), p.base_memory.end(),
                      [&](double m) { return m == p.base_memory.front(); });
      if (!uniform) bad_key(full, "requires an explicit base_memory override");
      p.base_memory.assign(static_cast<std::size_t>(n), p.base_memory.front());
    }
  } else if (key == "interest_rate") p.interest_rate = as_number(value, full);
  else if (key == "dividend_lo") p.dividend_lo = as_number(value, full);
  else if (key == "dividend_hi") p.dividend_hi = as_number(value, full);
  else if (key == "gamma_noise_sd") p.gamma_noise_sd = as_number(value, full);
  else if (key == "dt") p.dt = as_number(value, full);
  else if (key == "total_shares") p.total_shares = as_integer(value, full);
  else if (key == "memory_mode")
    p.memory_mode = memory_mode_from_name(as_string(value, full), full);
  else if (key == "base_memory") {
    if (!value.is_array()) bad_key(full, "must be an array");
    p.base_memory.clear();
    for (const json& entry : value)
      p.base_memory.push_back(as_number(entry, full));
  } else if (key == "history_init_mean")
    p.history_init_mean = as_number(value, full);
  else if (key == "history_init_sd")
    p.history_init_sd = as_number(value, full);
  else if (key == "initial_gamma") p.initial_gamma = as_number(value, full);
  else if (key == "initial_wealth") p.initial_wealth = as_number(value, full);
  else if (key == "initial_price") p.initial_price = as_number(value, full);
  else if (key == "initial_dividend")
    p.initial_dividend = as_number(value, full);
  else bad_key(full, "is not a Levy-Levy-Solomon parameter");
}

void apply_mf_override(experiments::MfStudySpec& spec, const std::string& key,
                       const json& value) {
  const std::string full = "override." + key;
  if (key == "interest_rate") spec.interest_rate = as_number(value, full);
  else if (key == "dividend") spec.dividend = as_number(value, full);
  else if (key == "horizon") spec.horizon = as_number(value, full);
  else if (key == "particle_dt") spec.particle_dt = as_number(value, full);
  else bad_key(full, "is not a mean-field study parameter");
}

ExperimentConfig base_config_for(Kind kind) {
  switch (kind) {
    case Kind::FwRun:
    case Kind::FwStabilitySweep:
    case Kind::OuSteadyState: {
      ExperimentConfig config = preset_config("fw-basic");
      config.preset.clear();
      config.kind = kind;
      return config;
    }
    case Kind::LlsRun:
    case Kind::LlsTimescaleSweep: {
      ExperimentConfig config = preset_config("lls-basic");
      config.preset.clear();
      config.kind = kind;
      return config;
    }
    case Kind::MfConvergence: {
      ExperimentConfig config;
      config.kind = kind;
      config.runs = 20;
      config.steps = 0;
      config.sweep.particle_counts = {100, 1000, 10000};
      return config;
    }
  }
  throw invalid_parameter_error("config: unhandled experiment kind");
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const KindEntry& entry : kKinds) out.push_back(entry.name);
  return out;
}

std::vector<std::string> preset_names() {
  return {"fw-basic", "lls-basic", "lls-3agents"};
}

const char* kind_name(Kind kind) {
  for (const KindEntry& entry : kKinds)
    if (entry.kind == kind) return entry.name;
  return "unknown";
}

const char* scheme_name(const ExperimentConfig& config) {
  if (config.scheme == fw::Scheme::SemiImplicit) return "semi_implicit";
  return config.fw.clamp_probabilities ? "explicit_clamped" : "explicit";
}

experiments::ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig config;
  config.preset = name;
  if (name == "fw-basic") {
    config.kind = Kind::FwRun;
    config.fw = fw::FwParams{};  // defaults are the basic calibration
    config.steps = 20000;
  } else if (name == "lls-basic") {
    config.kind = Kind::LlsRun;
    config.lls = lls::LlsParams{};
    config.lls.base_memory.assign(100, 15.0);
    config.steps = 200;
  } else if (name == "lls-3agents") {
    config.kind = Kind::LlsRun;
    config.lls = lls::LlsParams{};
    config.lls.num_agents = 99;
    config.lls.interest_rate = 0.0001;
    config.lls.dividend_lo = 0.00015;
    config.lls.dividend_hi = 0.00015;
    config.lls.total_shares = 9900;
    config.lls.initial_dividend = 0.004;
    config.lls.base_memory.clear();
    for (int i = 0; i < 99; ++i)
      config.lls.base_memory.push_back(i < 33 ? 10.0 : i < 66 ? 141.0 : 256.0);
    config.steps = 20000;
  } else {
    throw invalid_parameter_error("config: unknown preset \"" + name + "\"");
  }
  return config;
}

experiments::ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw invalid_parameter_error(std::string("config: invalid JSON: ") +
                                  err.what());
  }
  if (!j.is_object())
    throw invalid_parameter_error("config: document must be a JSON object");

  static const char* known[] = {"experiment", "preset", "override", "scheme",
                                "dt",         "steps",  "seed",     "runs",
                                "sweep",      "out"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) bad_key(item.key(), "is not a recognized config key");
  }

  if (!j.contains("experiment"))
    throw invalid_parameter_error("config: missing required key \"experiment\"");
  const Kind kind = kind_from_name(as_string(j["experiment"], "experiment"));

  ExperimentConfig config;
  if (j.contains("preset")) {
    config = preset_config(as_string(j["preset"], "preset"));
    config.kind = kind;
  } else {
    config = base_config_for(kind);
  }
  // ensemble defaults: sweeps average a hundred runs, the convergence study
  // twenty replicates
  if (kind == Kind::FwStabilitySweep || kind == Kind::LlsTimescaleSweep)
    config.runs = 100;
  else if (kind == Kind::MfConvergence)
    config.runs = 20;

  if (j.contains("scheme")) apply_scheme(config, as_string(j["scheme"], "scheme"));
  if (j.contains("dt")) {
    const double dt = as_number(j["dt"], "dt");
    if (is_fw_kind(kind)) config.fw.dt = dt;
    else if (is_lls_kind(kind)) config.lls.dt = dt;
    else bad_key("dt", "does not apply to this experiment");
  }
  if (j.contains("steps")) config.steps = as_integer(j["steps"], "steps");
  if (j.contains("seed"))
    config.seed = static_cast<std::uint64_t>(as_integer(j["seed"], "seed"));
  if (j.contains("runs"))
    config.runs = static_cast<int>(as_integer(j["runs"], "runs"));
  if (j.contains("out")) config.out = as_string(j["out"], "out");

  if (j.contains("sweep")) {
    const json& sweep = j["sweep"];
    if (!sweep.is_object()) bad_key("sweep", "must be an object");
    for (const auto& item : sweep.items()) {
      const std::string full = "sweep." + item.key();
      if (!item.value().is_array()) bad_key(full, "must be an array");
      if (item.key() == "sigma_f") {
        config.sweep.sigma_f.clear();
        for (const json& v : item.value())
          config.sweep.sigma_f.push_back(as_number(v, full));
      } else if (item.key() == "dt") {
        config.sweep.dt.clear();
        for (const json& v : item.value())
          config.sweep.dt.push_back(as_number(v, full));
      } else if (item.key() == "memory_mode") {
        config.sweep.memory_mode.clear();
        for (const json& v : item.value())
          config.sweep.memory_mode.push_back(
              memory_mode_from_name(as_string(v, full), full));
      } else if (item.key() == "N") {
        config.sweep.particle_counts.clear();
        for (const json& v : item.value())
          config.sweep.particle_counts.push_back(
              static_cast<int>(as_integer(v, full)));
      } else {
        bad_key(full, "is not a sweep axis");
      }
    }
  }

  if (j.contains("override")) {
    const json& override = j["override"];
    if (!override.is_object()) bad_key("override", "must be an object");
    for (const auto& item : override.items()) {
      if (is_fw_kind(kind)) apply_fw_override(config.fw, item.key(), item.value());
      else if (is_lls_kind(kind))
        apply_lls_override(config.lls, item.key(), item.value());
      else apply_mf_override(config.mf_study, item.key(), item.value());
    }
  }

  config.validate();
  return config;
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["experiment"] = kind_name(config.kind);
  if (!config.preset.empty()) j["preset"] = config.preset;
  j["steps"] = config.steps;
  j["seed"] = config.seed;
  j["runs"] = config.runs;
  j["out"] = config.out;

  if (is_fw_kind(config.kind)) {
    j["scheme"] = scheme_name(config);
    json o;
    o["phi"] = config.fw.phi;
    o["chi"] = config.fw.chi;
    o["alpha_p"] = config.fw.alpha_p;
    o["alpha_h"] = config.fw.alpha_h;
    o["alpha_m"] = config.fw.alpha_m;
    o["sigma_f"] = config.fw.sigma_f;
    o["sigma_c"] = config.fw.sigma_c;
    o["nu"] = config.fw.nu;
    o["fundamental_price"] = config.fw.fundamental_price;
    o["mu"] = config.fw.mu;
    o["dt"] = config.fw.dt;
    j["override"] = o;
  } else if (is_lls_kind(config.kind)) {
    json o;
    o["num_agents"] = config.lls.num_agents;
    o["interest_rate"] = config.lls.interest_rate;
    o["dividend_lo"] = config.lls.dividend_lo;
    o["dividend_hi"] = config.lls.dividend_hi;
    o["gamma_noise_sd"] = config.lls.gamma_noise_sd;
    o["dt"] = config.lls.dt;
    o["total_shares"] = config.lls.total_shares;
    o["memory_mode"] = memory_mode_name(config.lls.memory_mode);
    o["base_memory"] = config.lls.base_memory;
    o["history_init_mean"] = config.lls.history_init_mean;
    o["history_init_sd"] = config.lls.history_init_sd;
    o["initial_gamma"] = config.lls.initial_gamma;
    o["initial_wealth"] = config.lls.initial_wealth;
    o["initial_price"] = config.lls.initial_price;
    o["initial_dividend"] = config.lls.initial_dividend;
    j["override"] = o;
  } else if (config.kind == Kind::MfConvergence) {
    json o;
    o["interest_rate"] = config.mf_study.interest_rate;
    o["dividend"] = config.mf_study.dividend;
    o["horizon"] = config.mf_study.horizon;
    o["particle_dt"] = config.mf_study.particle_dt;
    j["override"] = o;
  }

  json sweep;
  if (!config.sweep.sigma_f.empty()) sweep["sigma_f"] = config.sweep.sigma_f;
  if (!config.sweep.dt.empty()) sweep["dt"] = config.sweep.dt;
  if (!config.sweep.memory_mode.empty()) {
    std::vector<std::string> names;
    for (lls::MemoryMode mode : config.sweep.memory_mode)
      names.push_back(memory_mode_name(mode));
    sweep["memory_mode"] = names;
  }
  if (!config.sweep.particle_counts.empty())
    sweep["N"] = config.sweep.particle_counts;
  if (!sweep.empty()) j["sweep"] = sweep;

  return j.dump(2) + "\n";
}

}  // namespace abcem::cli
