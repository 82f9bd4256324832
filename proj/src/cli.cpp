#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "abcem/config.hpp"
#include "abcem/errors.hpp"
#include "abcem/output.hpp"

namespace abcem::cli {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw simulation_error("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"simulation lab for agent-based market models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_override, "output directory (overrides config)");

  std::string preset_name;
  CLI::App* preset =
      app.add_subcommand("preset", "print a fully expanded preset config");
  preset->add_option("name", preset_name, "preset name")->required();

  CLI::App* list =
      app.add_subcommand("list", "list experiment kinds and presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    std::cerr << err.what() << "\n";
    return 1;
  }

  try {
    if (list->parsed()) {
      std::cout << "experiments:\n";
      for (const std::string& name : experiment_names())
        std::cout << "  " << name << "\n";
      std::cout << "presets:\n";
      for (const std::string& name : preset_names())
        std::cout << "  " << name << "\n";
      return 0;
    }
    if (preset->parsed()) {
      std::cout << config_to_json(preset_config(preset_name));
      return 0;
    }
    // run
    const std::string text = read_file(config_path);
    experiments::ExperimentConfig config = parse_config(text);
    const std::filesystem::path dir =
        out_override.empty() ? std::filesystem::path(config.out)
                             : std::filesystem::path(out_override);
    run_experiment(config, dir);
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
  } catch (const invalid_parameter_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}

}  // namespace abcem::cli
