#pragma once

#include <filesystem>
#include <string>

#include "abcem/experiments.hpp"

namespace abcem::cli {

// Full round-trip precision (17 significant digits), '.' decimal point;
// reruns of the same config produce byte-identical files.
std::string format_double(double value);

// Writes through a temporary file and renames, so no output file is left
// partially written on error.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// Writes the experiment's CSV files plus a metadata.json sidecar (config
// echo, seed list, code version, warm-up policy) into `dir`.
void write_outputs(const experiments::ExperimentConfig& config,
                   const experiments::FwRunResult& result,
                   const std::filesystem::path& dir);
void write_outputs(const experiments::ExperimentConfig& config,
                   const experiments::BlowupReport& result,
                   const std::filesystem::path& dir);
void write_outputs(const experiments::ExperimentConfig& config,
                   const experiments::LlsRunResult& result,
                   const std::filesystem::path& dir);
void write_outputs(const experiments::ExperimentConfig& config,
                   const experiments::LlsSweepReport& result,
                   const std::filesystem::path& dir);
void write_outputs(const experiments::ExperimentConfig& config,
                   const experiments::ConvergenceReport& result,
                   const std::filesystem::path& dir);
void write_outputs(const experiments::ExperimentConfig& config,
                   const experiments::OuReport& result,
                   const std::filesystem::path& dir);

// Parses, dispatches and writes one experiment; returns the output dir.
std::filesystem::path run_experiment(const experiments::ExperimentConfig& config,
                                     const std::filesystem::path& dir);

// Command-line entry: run <config.json> [--out DIR] | preset <name> | list.
// Exit codes: 0 success, 1 validation error, 2 runtime error.
int run_cli(int argc, const char* const* argv);

}  // namespace abcem::cli
