// oracle.hpp: brute-force references for the effective-molecule engine
//
// build_explicit_hamiltonian() keeps every molecule of a small ensemble with
// its own vibrational coordinate, the single-molecule coupling g = G / sqrt(N)
// and no Franck-Condon projector. As N grows at fixed G its local observables
// should approach those of build_effective_hamiltonian().

#pragma once

#include "polariton/hamiltonian.hpp"
#include "polariton/observables.hpp"
#include "polariton/propagator.hpp"

#include <cstddef>
#include <vector>

namespace polariton {

struct OracleLimits {
  std::size_t max_molecules{4};
  std::size_t max_n_vib{6};
  std::size_t max_dimension{20'000};
};

struct ExplicitEnsemble {
  ModelSpec spec;
  std::size_t n_vib{0};
  BinSet bins;                             // occupied bins, P_i = N_i / N
  std::vector<std::size_t> molecule_bin;   // index into `bins`
  double g{0.0};                           // single-molecule coupling

  std::size_t size() const { return molecule_bin.size(); }
};

// Distributes n_molecules over `bins` by largest remainder of P_i N (ties to
// the lower bin), drops empty bins and sets g = G / sqrt(N).
ExplicitEnsemble make_ensemble(const ModelSpec& spec, const BinSet& bins, std::size_t n_molecules,
                               std::size_t n_vib, const OracleLimits& limits = {});

// First excitation manifold, (1 + 2N) n_vib^N states; labels carry each
// molecule's bin so population_row() aggregates per bin.
EffectiveHamiltonian build_explicit_hamiltonian(const ExplicitEnsemble& ensemble, const OracleLimits& limits = {});

struct Deviation {
  double max{0.0};
  double final{0.0};
};

struct DeviationReport {
  Deviation photon;
  Deviation e1_bin;     // worst bin
  Deviation e2_bin;
  Deviation e1_total;
  Deviation e2_total;
  Deviation autocorrelation;
};

// Local observables recorded from one run.
struct RunObservables {
  Trajectory trajectory;
  PopulationRecord populations;
};

RunObservables run_with_populations(const EffectiveHamiltonian& h, const StateVector& psi0,
                                    const PropagationOptions& options);

// Throws std::invalid_argument if the two runs do not share a time grid and bin count.
DeviationReport compare_runs(const RunObservables& a, const RunObservables& b);

// Explicit ensemble vs the effective-molecule engine with the same occupied bins.
DeviationReport compare_to_cute(const ExplicitEnsemble& ensemble, const InitialState& init,
                                const PropagationOptions& options, const OracleLimits& limits = {});

// Per-bin-coordinate Hamiltonian vs the shared-coordinate one (at most two bins).
DeviationReport compare_multibin_to_cute(const ModelSpec& spec, const BinSet& bins, std::size_t n_vib,
                                         const InitialState& init, const PropagationOptions& options);

}  // namespace polariton
