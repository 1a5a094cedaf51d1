// config.hpp: run configuration: parsing, layering, resolution, echo
//
// Format: `key = value` lines under `[section]` headers, `#` comments.
//
//   [model]   omega0 omega_nu s1 s2 v12 delta2 omega_c kappa coupling sigma
//   [run]     n_bins (integer | auto) n_vib t_final dt_record tolerance
//             initial_state (photonic | bright | upper | lower | custom)
//             custom_amplitudes ("re im" per entry, photon first, comma separated)
//             snapshot_times output_dir preset max_dimension
//   [sweep]   sigma coupling kappa delta2 initial_state (comma separated lists)
//   [oracle]  molecules n_vib
//
// Times accept an `fs` or `au` suffix (default au). Unknown keys are errors.

#pragma once

#include "polariton/model.hpp"
#include "polariton/propagator.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polariton::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered "section.key" -> raw value; later layers overwrite earlier ones.
class RawConfig {
 public:
  void merge_text(std::string_view text, std::string_view origin);
  // "section.key=value" or "key=value" (first of model, run, oracle that knows the key).
  void apply_override(std::string_view assignment);
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct SweepGrid {
  std::vector<double> sigma;
  std::vector<double> coupling;
  std::vector<double> kappa;
  std::vector<double> delta2;
  std::vector<InitialKind> initial_state;

  bool empty() const {
    return sigma.empty() && coupling.empty() && kappa.empty() && delta2.empty() && initial_state.empty();
  }
};

struct OracleSettings {
  std::vector<std::size_t> molecules{1, 2, 4};
  std::size_t n_vib{5};
};

struct RunConfig {
  ModelSpec model;
  std::optional<std::size_t> n_bins;  // empty: bin_count_rule
  std::size_t n_vib{60};
  double t_final{30.0 * au_per_fs};
  double dt_record{1.0};
  double tolerance{1e-9};
  InitialState initial;
  std::vector<double> snapshot_times;
  std::string output_dir{"out"};
  std::string preset;
  std::size_t max_dimension{default_max_dimension};
  SweepGrid sweep;
  OracleSettings oracle;

  std::size_t resolved_bins() const;
};

RunConfig parse_config(const RawConfig& raw);

// Canonical text of a configuration; parse_config() of it yields the same run.
std::string echo_config(const RunConfig& config);

// One grid point of the sweep applied to the base configuration.
struct SweepPoint {
  RunConfig config;
  std::vector<std::pair<std::string, std::string>> labels;  // swept parameter -> value
};
// Cartesian product in a fixed order (sigma, coupling, kappa, delta2, initial_state).
std::vector<SweepPoint> expand_sweep(const RunConfig& config);

std::string initial_kind_name(InitialKind kind);

const std::vector<std::pair<std::string, std::string>>& preset_table();
std::optional<std::string> find_preset(std::string_view name);

}  // namespace polariton::cli
