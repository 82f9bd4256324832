#pragma once

#include <string>
#include <vector>

#include "abcem/experiments.hpp"

namespace abcem::cli {

inline constexpr const char* kVersion = "0.1.0";

std::vector<std::string> experiment_names();
std::vector<std::string> preset_names();

// Fully populated config for a named calibration preset. fw-basic maps to
// fw_run, the lls presets to lls_run; the experiment key of a parsed
// config can repoint them.
experiments::ExperimentConfig preset_config(const std::string& name);

// Parse a JSON experiment description. A "preset" key expands first,
// explicit keys override; unknown or ill-typed keys raise
// invalid_parameter_error naming the offending key.
experiments::ExperimentConfig parse_config(const std::string& json_text);

// Serialization with every model parameter explicit; parsing the output
// reproduces the config exactly.
std::string config_to_json(const experiments::ExperimentConfig& config);

const char* kind_name(experiments::Kind kind);
const char* scheme_name(const experiments::ExperimentConfig& config);

}  // namespace abcem::cli
