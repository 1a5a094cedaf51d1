// hamiltonian.hpp: vibrational operators and sparse effective Hamiltonians
//
// Vibrational states are expanded in the undisplaced Fock basis of the ground
// surface, truncated to n_vib levels. The displaced surfaces enter through
//   D(s) b^dag b D^dag(s) = b^dag b - s (b + b^dag) + s^2,
// which is tridiagonal in that basis.

#pragma once

#include "polariton/model.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <vector>

namespace polariton {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using StateVector = Eigen::VectorXcd;

inline constexpr std::size_t default_max_dimension = 4'000'000;

struct VibOperator {
  std::size_t n_vib{0};
  Eigen::MatrixXd entries;
};

// Truncated matrix of b^dag b - s (b + b^dag) + s^2. Requires n_vib >= 2.
VibOperator displaced_number_operator(double s, std::size_t n_vib);

// <0| D(s) |l> = exp(-s^2/2) (-s)^l / sqrt(l!); eigenstates of the displaced
// surface are D(s)|l>, consistent with displaced_number_operator().
double fc_overlap(double s, std::size_t l);

enum class Engine { SingleCoordinate, MultiCoordinate, Explicit };

// Sparse non-Hermitian Hamiltonian of the first excitation manifold together
// with the bookkeeping observables need: a label per basis state (the `vib`
// field is the level of the electronically active coordinate) and the
// Franck-Condon excitation sites of each bin.
struct EffectiveHamiltonian {
  Engine engine{Engine::SingleCoordinate};
  SparseMatrix matrix;
  double kappa{0.0};
  std::size_t n_bins{0};
  std::size_t n_vib{0};
  std::vector<StateLabel> labels;
  std::vector<double> bin_weights;
  // fc_sites[i]: flat indices of |e1, molecule in bin i> x |FC>; the bright
  // state puts sqrt(P_i / fc_sites[i].size()) on each of them.
  std::vector<std::vector<std::size_t>> fc_sites;
  // Flat index of |1> x |FC>.
  std::size_t photon_fc{0};

  std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
};

// Single shared coordinate, 1 + 2 n_bins n_vib states.
EffectiveHamiltonian build_effective_hamiltonian(const ModelSpec& spec, const BinSet& bins,
                                                 std::size_t n_vib,
                                                 std::size_t max_dimension = default_max_dimension);

// One coordinate per bin (tensor product), at most two bins. The photon sector
// is the single state |1> x |FC, FC>; spectator coordinates of an excited bin
// carry the undisplaced ground-surface oscillator.
EffectiveHamiltonian build_multibin_hamiltonian(const ModelSpec& spec, const BinSet& bins,
                                                std::size_t n_vib,
                                                std::size_t max_dimension = default_max_dimension);

// H + (i kappa / 2) on every photon diagonal entry.
SparseMatrix hermitian_part(const EffectiveHamiltonian& h);

}  // namespace polariton
