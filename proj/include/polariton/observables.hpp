// observables.hpp: spectra, populations, vibrational energies, yields

#pragma once

#include "polariton/hamiltonian.hpp"
#include "polariton/propagator.hpp"

#include <vector>

namespace polariton {

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> absorbance;
};

// [omega0 - 3 sigma - 3 G, omega0 + omega_nu + 3 sigma + 3 G] in steps of `step`.
std::vector<double> default_omega_grid(const ModelSpec& spec, double step = 1e-4);

// A(w) = kappa Re C(w) - kappa^2 |C(w)|^2 / 2 with C(w) the trapezoidal
// transform of the autocorrelation over the recorded window. Requires a
// trajectory started from the photonic state.
Spectrum absorption(const Trajectory& traj, double kappa, const std::vector<double>& omega_grid);

struct PopulationRow {
  double time{0.0};
  std::vector<double> e1;  // per bin
  std::vector<double> e2;  // per bin
  double e1_total{0.0};
  double e2_total{0.0};
  double photon{0.0};
  double norm2{0.0};

  double leakage() const { return 1.0 - norm2; }
  double e1_normalized() const { return e1_total / norm2; }
  double e2_normalized() const { return e2_total / norm2; }
};

struct PopulationRecord {
  std::vector<PopulationRow> rows;
};

PopulationRow population_row(const StateVector& psi, const EffectiveHamiltonian& h, double time);

// From the snapshots of a trajectory; throws if none were kept.
PopulationRecord populations(const Trajectory& traj, const EffectiveHamiltonian& h);

// Observer that records a population row at every record time, for runs too
// large to keep full snapshots.
class PopulationAccumulator {
 public:
  explicit PopulationAccumulator(const EffectiveHamiltonian& h) : h_(h) {}
  StateObserver observer();
  const PopulationRecord& record() const { return record_; }
  PopulationRecord take() { return std::move(record_); }

 private:
  const EffectiveHamiltonian& h_;
  PopulationRecord record_;
};

// omega_nu <psi_e1,i| N(s1) |psi_e1,i> / P_e1,i: energy above the e1 minimum
// of the reactant wavepacket in bin i. Single-coordinate engine only.
double vibrational_energy_per_bin(const StateVector& psi, const EffectiveHamiltonian& h,
                                  const ModelSpec& spec, std::size_t bin);

// Interior points strictly above both neighbors.
std::vector<std::size_t> local_maxima(const Spectrum& s);

struct RabiSplitting {
  double splitting{0.0};
  std::size_t lower{0};   // grid index of the lower-frequency peak
  std::size_t upper{0};   // grid index of the higher-frequency peak
  double side_peak{0.0};  // largest remaining local maximum, 0 if none
};

// Distance between the two largest local maxima; ties go to the wider pair.
RabiSplitting rabi_splitting(const Spectrum& s);

struct YieldReport {
  std::vector<double> per_bin;
  std::vector<double> per_bin_normalized;
  double total{0.0};
  double total_normalized{0.0};
  double leakage{0.0};
};

// Product (e2) populations at the last recorded time.
YieldReport reaction_yield(const PopulationRecord& record);

}  // namespace polariton
