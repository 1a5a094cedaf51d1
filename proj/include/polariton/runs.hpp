// runs.hpp: experiment drivers behind the command-line tool
//
// Every driver resolves the configuration (bins, Hamiltonian, initial state),
// runs it, and writes its CSV files plus manifest.ini into
// config.output_dir. The compute_* functions do the same work in memory.

#pragma once

#include "polariton/config.hpp"
#include "polariton/model.hpp"
#include "polariton/observables.hpp"
#include "polariton/oracle.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polariton::cli {

std::string version();

struct RunOptions {
  std::size_t threads{1};
  std::ostream* log{nullptr};
};

// Runs jobs 0..count-1 on `threads` workers; job(k) must be independent of
// the others. The first exception thrown by a job is rethrown after all finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

struct SpectrumResult {
  BinSet bins;
  Trajectory trajectory;
  Spectrum spectrum;
  std::optional<RabiSplitting> rabi;  // empty when fewer than two maxima
};

struct VibEnergyRow {
  double time{0.0};
  std::size_t bin{0};
  double population{0.0};
  std::optional<double> energy;  // empty for a bin without reactant population
};

struct DynamicsResult {
  BinSet bins;
  PopulationRecord populations;
  std::vector<VibEnergyRow> vib_energy;
  YieldReport yield;
};

SpectrumResult compute_spectrum(const RunConfig& config);
DynamicsResult compute_dynamics(const RunConfig& config);

struct SweepRow {
  std::vector<std::pair<std::string, std::string>> labels;
  RunConfig config;
  std::size_t n_bins{0};
  double p_e2{0.0};
  double p_e2_normalized{0.0};
  double gamma{0.0};
  std::string status{"ok"};
};

struct ConvergeLevel {
  std::size_t n_bins{0};
  double ratio_final{0.0};        // P_e2(T_f) / P_e1(T_f)
  double ratio_change{0.0};       // relative change of ratio_final against the rule level
  double max_dev_absorption{0.0}; // against the previous (coarser) level
  double max_dev_gamma{0.0};
  double max_dev_ratio{0.0};
};

struct ConvergeReport {
  std::size_t rule{0};
  std::vector<ConvergeLevel> levels;  // rule/4, rule/2, rule, 2 rule (duplicates dropped)
};

struct OracleRow {
  std::size_t molecules{0};
  std::size_t dimension{0};
  DeviationReport deviation;
};

struct OracleReport {
  std::vector<OracleRow> explicit_rows;
  std::optional<DeviationReport> multibin;  // only for at most two bins
};

ConvergeReport compute_converge(const RunConfig& config, const RunOptions& options = {});
OracleReport compute_oracle(const RunConfig& config, const RunOptions& options = {});

// File-writing drivers. A [sweep] section makes spectrum and dynamics run each
// grid point into point_XXX/ with an index in points.csv. Return the number of
// failed grid points (always 0 for converge and oracle, which throw instead).
std::size_t run_spectrum(const RunConfig& config, const RunOptions& options = {});
std::size_t run_dynamics(const RunConfig& config, const RunOptions& options = {});
std::size_t run_sweep(const RunConfig& config, const RunOptions& options = {});
std::size_t run_converge(const RunConfig& config, const RunOptions& options = {});
std::size_t run_oracle(const RunConfig& config, const RunOptions& options = {});

// sweep.csv rows for the whole grid, sorted by parameters.
std::vector<SweepRow> compute_sweep(const RunConfig& config, const RunOptions& options = {});

// Dispatches a subcommand and maps failures to exit codes: 0 success,
// 1 configuration or output error, 2 numerical failure.
int execute(const std::string& command, const RunConfig& config, const RunOptions& options, std::ostream& err);

}  // namespace polariton::cli
