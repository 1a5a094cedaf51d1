// hamiltonian.cpp: assembly of the effective Hamiltonians

#include "polariton/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polariton {

namespace {

using Triplet = Eigen::Triplet<cplx>;

void push(std::vector<Triplet>& t, std::size_t r, std::size_t c, cplx v) {
  if (v != cplx{0.0, 0.0})
    t.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), v);
}

void push_symmetric(std::vector<Triplet>& t, std::size_t r, std::size_t c, double v) {
  push(t, r, c, v);
  push(t, c, r, v);
}

void check_inputs(const ModelSpec& spec, const BinSet& bins, std::size_t n_vib) {
  spec.validate();
  if (n_vib < 2) throw std::invalid_argument("Hamiltonian: n_vib must be >= 2");
  if (bins.size() == 0) throw std::invalid_argument("Hamiltonian: empty bin set");
}

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
    throw std::length_error("Hamiltonian: dimension overflow");
  return a * b;
}

void check_cap(std::size_t dim, std::size_t cap) {
  if (dim > cap)
    throw std::length_error("Hamiltonian: dimension " + std::to_string(dim) + " exceeds cap " +
                            std::to_string(cap));
}

// Adds offset + omega_nu * N(s) on the block starting at `first`.
void push_surface(std::vector<Triplet>& t, std::size_t first, std::size_t n_vib, double offset,
                  double omega_nu, double s) {
  for (std::size_t n = 0; n < n_vib; ++n) {
    const double diag = offset + omega_nu * (static_cast<double>(n) + s * s);
    push(t, first + n, first + n, diag);
    if (n + 1 < n_vib)
      push_symmetric(t, first + n, first + n + 1, -omega_nu * s * std::sqrt(double(n + 1)));
  }
}

}  // namespace

VibOperator displaced_number_operator(double s, std::size_t n_vib) {
  if (n_vib < 2) throw std::invalid_argument("displaced_number_operator: n_vib must be >= 2");
  VibOperator op{n_vib, Eigen::MatrixXd::Zero(Eigen::Index(n_vib), Eigen::Index(n_vib))};
  for (std::size_t n = 0; n < n_vib; ++n) {
    const auto i = Eigen::Index(n);
    op.entries(i, i) = double(n) + s * s;
    if (n + 1 < n_vib) {
      op.entries(i, i + 1) = -s * std::sqrt(double(n + 1));
      op.entries(i + 1, i) = op.entries(i, i + 1);
    }
  }
  return op;
}

double fc_overlap(double s, std::size_t l) {
  if (s == 0.0) return l == 0 ? 1.0 : 0.0;
  const double dl = static_cast<double>(l);
  const double magnitude = std::exp(-0.5 * s * s + dl * std::log(std::abs(s)) - 0.5 * std::lgamma(dl + 1.0));
  const bool negative = (s > 0.0) && (l % 2 == 1);  // sign of (-s)^l
  return negative ? -magnitude : magnitude;
}

EffectiveHamiltonian build_effective_hamiltonian(const ModelSpec& spec, const BinSet& bins,
                                                 std::size_t n_vib, std::size_t max_dimension) {
  check_inputs(spec, bins, n_vib);
  const std::size_t nb = bins.size();
  const std::size_t dim = 1 + checked_mul(2, checked_mul(nb, n_vib));
  check_cap(dim, max_dimension);
  const Basis basis(nb, n_vib);

  std::vector<Triplet> t;
  t.reserve(1 + nb * (2 * (3 * n_vib) + 2 + 2 * n_vib));
  push(t, 0, 0, cplx{spec.omega_c, -0.5 * spec.kappa});
  for (std::size_t i = 0; i < nb; ++i) {
    const double w0 = bins[i].omega0;
    push_surface(t, basis.e1(i, 0), n_vib, w0, spec.omega_nu, spec.s1);
    push_surface(t, basis.e2(i, 0), n_vib, w0 + spec.delta2, spec.omega_nu, spec.s2);
    push_symmetric(t, 0, basis.e1(i, 0), spec.coupling * std::sqrt(bins[i].weight));
    for (std::size_t n = 0; n < n_vib; ++n) push_symmetric(t, basis.e1(i, n), basis.e2(i, n), spec.v12);
  }

  EffectiveHamiltonian h;
  h.engine = Engine::SingleCoordinate;
  h.matrix.resize(Eigen::Index(dim), Eigen::Index(dim));
  h.matrix.setFromTriplets(t.begin(), t.end());
  h.matrix.makeCompressed();
  h.kappa = spec.kappa;
  h.n_bins = nb;
  h.n_vib = n_vib;
  h.labels.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) h.labels.push_back(basis.label(k));
  for (std::size_t i = 0; i < nb; ++i) {
    h.bin_weights.push_back(bins[i].weight);
    h.fc_sites.push_back({basis.e1(i, 0)});
  }
  h.photon_fc = 0;
  return h;
}

EffectiveHamiltonian build_multibin_hamiltonian(const ModelSpec& spec, const BinSet& bins,
                                                std::size_t n_vib, std::size_t max_dimension) {
  check_inputs(spec, bins, n_vib);
  const std::size_t nb = bins.size();
  if (nb > 2) throw std::invalid_argument("build_multibin_hamiltonian: at most two bins");

  std::size_t sector = 1;  // n_vib^n_bins
  for (std::size_t j = 0; j < nb; ++j) sector = checked_mul(sector, n_vib);
  const std::size_t dim = 1 + checked_mul(2 * nb, sector);
  check_cap(dim, max_dimension);

  // Digit of coordinate j in a sector-local index; coordinate 0 is least significant.
  std::vector<std::size_t> stride(nb, 1);
  for (std::size_t j = 1; j < nb; ++j) stride[j] = stride[j - 1] * n_vib;
  auto digit = [&](std::size_t local, std::size_t j) { return (local / stride[j]) % n_vib; };
  auto block_start = [&](int kind, std::size_t bin) { return 1 + (kind * nb + bin) * sector; };

  EffectiveHamiltonian h;
  h.engine = Engine::MultiCoordinate;
  h.labels.resize(dim);

  std::vector<Triplet> t;
  push(t, 0, 0, cplx{spec.omega_c, -0.5 * spec.kappa});
  for (int kind = 0; kind < 2; ++kind) {
    const double s = kind == 0 ? spec.s1 : spec.s2;
    for (std::size_t i = 0; i < nb; ++i) {
      const double offset = bins[i].omega0 + (kind == 1 ? spec.delta2 : 0.0);
      const std::size_t first = block_start(kind, i);
      for (std::size_t local = 0; local < sector; ++local) {
        const std::size_t row = first + local;
        const std::size_t n = digit(local, i);
        double diag = offset + spec.omega_nu * (double(n) + s * s);
        for (std::size_t j = 0; j < nb; ++j)
          if (j != i) diag += spec.omega_nu * double(digit(local, j));
        push(t, row, row, diag);
        if (n + 1 < n_vib)
          push_symmetric(t, row, row + stride[i], -spec.omega_nu * s * std::sqrt(double(n + 1)));
        if (kind == 0) push_symmetric(t, row, block_start(1, i) + local, spec.v12);
        h.labels[row] = {kind == 0 ? StateKind::E1 : StateKind::E2, i, n};
      }
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    push_symmetric(t, 0, block_start(0, i), spec.coupling * std::sqrt(bins[i].weight));
    h.bin_weights.push_back(bins[i].weight);
    h.fc_sites.push_back({block_start(0, i)});
  }

  h.matrix.resize(Eigen::Index(dim), Eigen::Index(dim));
  h.matrix.setFromTriplets(t.begin(), t.end());
  h.matrix.makeCompressed();
  h.kappa = spec.kappa;
  h.n_bins = nb;
  h.n_vib = n_vib;
  h.photon_fc = 0;
  return h;
}

SparseMatrix hermitian_part(const EffectiveHamiltonian& h) {
  SparseMatrix m = h.matrix;
  for (std::size_t k = 0; k < h.labels.size(); ++k)
    if (h.labels[k].kind == StateKind::Photon) m.coeffRef(Eigen::Index(k), Eigen::Index(k)) += cplx{0.0, 0.5 * h.kappa};
  m.prune(cplx{0.0, 0.0});
  return m;
}

}  // namespace polariton
