// propagator.hpp: time evolution under time-independent sparse Hamiltonians
//
// propagate() is the production path: Arnoldi/Krylov steps with an a
// posteriori error integral, so every recorded state equals exp(-iHt) psi0
// within the requested 2-norm tolerance. propagate_eom() integrates the
// amplitude equations in the vibrational eigenbases of the two surfaces with
// an adaptive Runge-Kutta stepper and serves as an independent cross-check.

#pragma once

#include "polariton/hamiltonian.hpp"
#include "polariton/model.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polariton {

class PropagationError : public std::runtime_error {
 public:
  PropagationError(const std::string& what, std::size_t step, double time)
      : std::runtime_error(what + " (step " + std::to_string(step) + ", t = " + std::to_string(time) + " au)"),
        step_(step),
        time_(time) {}
  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

// Called once per record time with the record index, the time and the state.
using StateObserver = std::function<void(std::size_t, double, const StateVector&)>;

struct PropagationOptions {
  double dt_record{1.0};
  double t_final{0.0};
  double tolerance{1e-9};
  std::size_t snapshot_stride{0};  // keep every k-th recorded state; 0 keeps none
  StateObserver observer;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<cplx> autocorrelation;  // <psi(0)|psi(t_k)>
  std::vector<double> norms2;         // <psi(t_k)|psi(t_k)>
  StateVector initial_state;
  std::vector<std::size_t> snapshot_indices;
  std::vector<StateVector> snapshots;

  std::size_t size() const { return times.size(); }
};

enum class InitialKind { Photonic, Bright, UpperPolariton, LowerPolariton, Custom };

struct InitialState {
  InitialKind kind{InitialKind::Photonic};
  // Custom only: amplitude on |1>|FC> and on each bin's bright Franck-Condon site.
  cplx custom_photon{0.0, 0.0};
  std::vector<cplx> custom_bins;

  static InitialState photonic() { return {}; }
  static InitialState bright() { return {InitialKind::Bright, {}, {}}; }
  static InitialState upper() { return {InitialKind::UpperPolariton, {}, {}}; }
  static InitialState lower() { return {InitialKind::LowerPolariton, {}, {}}; }
  static InitialState custom(cplx photon, std::vector<cplx> bins) {
    return {InitialKind::Custom, photon, std::move(bins)};
  }
};

// Builds the unit-norm initial vector for any engine's Hamiltonian.
StateVector make_initial_state(const InitialState& init, const EffectiveHamiltonian& h);

// Record times are k dt_record while below t_final, then t_final itself (the
// last interval may be shorter). record_count() validates the grid.
std::size_t record_count(double dt_record, double t_final);
double record_time(std::size_t k, double dt_record, double t_final);

Trajectory propagate(const EffectiveHamiltonian& h, const StateVector& psi0, const PropagationOptions& options);

// psi0 is given in the Fock-basis layout of build_effective_hamiltonian();
// snapshots and observer states are returned in the same layout.
Trajectory propagate_eom(const ModelSpec& spec, const BinSet& bins, std::size_t n_vib,
                         const StateVector& psi0, const PropagationOptions& options);

}  // namespace polariton
