// polsim: command-line driver for the polariton simulator

#include "polariton/config.hpp"
#include "polariton/runs.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw polariton::cli::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace polariton::cli;

  CLI::App app{"Disordered molecular polariton dynamics in the first excitation manifold"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, preset, out_dir;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> overrides;
  bool quiet = false;
  app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset, "Named preset loaded before --config");
  app.add_option("--out", out_dir, "Output directory (overrides run.output_dir)");
  app.add_option("--threads", threads, "Worker threads for sweeps and convergence runs")->check(CLI::PositiveNumber);
  app.add_option("--override", overrides, "key=value, applied after the config file");
  app.add_flag("--quiet", quiet, "No progress output");
  app.add_subcommand("spectrum", "Absorption spectrum from the photonic initial state");
  app.add_subcommand("dynamics", "Populations, leakage and vibrational energies");
  app.add_subcommand("sweep", "Final product yield over a parameter grid");
  app.add_subcommand("converge", "Convergence with the number of disorder bins");
  app.add_subcommand("oracle", "Explicit finite-N ensembles against the effective model");
  app.add_subcommand("presets", "List the built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  if (command == "presets") {
    for (const auto& [name, text] : preset_table()) std::cout << name << '\n';
    return 0;
  }

  RunConfig config;
  try {
    RawConfig raw;
    if (!preset.empty()) {
      const auto text = find_preset(preset);
      if (!text) throw ConfigError("unknown preset '" + preset + "'");
      raw.merge_text(*text, "preset " + preset);
    }
    if (!config_path.empty()) raw.merge_text(read_file(config_path), config_path);
    for (const std::string& o : overrides) raw.apply_override(o);
    if (!out_dir.empty()) raw.apply_override("run.output_dir=" + out_dir);
    config = parse_config(raw);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  }

  RunOptions options;
  options.threads = threads;
  options.log = quiet ? nullptr : &std::clog;
  return execute(command, config, options, std::cerr);
}
