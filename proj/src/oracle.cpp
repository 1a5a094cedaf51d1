// oracle.cpp

#include "polariton/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polariton {

ExplicitEnsemble make_ensemble(const ModelSpec& spec, const BinSet& bins, std::size_t n_molecules,
                               std::size_t n_vib, const OracleLimits& limits) {
  spec.validate();
  if (n_molecules == 0) throw std::invalid_argument("make_ensemble: need at least one molecule");
  if (n_molecules > limits.max_molecules)
    throw std::length_error("make_ensemble: more than " + std::to_string(limits.max_molecules) + " molecules");
  if (n_vib < 2 || n_vib > limits.max_n_vib)
    throw std::length_error("make_ensemble: n_vib outside [2, " + std::to_string(limits.max_n_vib) + "]");

  const std::size_t nb = bins.size();
  std::vector<std::size_t> count(nb);
  std::vector<double> remainder(nb);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < nb; ++i) {
    const double exact = bins[i].weight * double(n_molecules);
    count[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - double(count[i]);
    assigned += count[i];
  }
  std::vector<std::size_t> order(nb);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n_molecules; ++k, ++assigned) ++count[order[k % nb]];

  ExplicitEnsemble e;
  e.spec = spec;
  e.n_vib = n_vib;
  e.g = spec.coupling / std::sqrt(double(n_molecules));
  std::vector<Bin> occupied;
  for (std::size_t i = 0; i < nb; ++i) {
    if (count[i] == 0) continue;
    Bin b = bins[i];
    b.weight = double(count[i]) / double(n_molecules);
    for (std::size_t m = 0; m < count[i]; ++m) e.molecule_bin.push_back(occupied.size());
    occupied.push_back(b);
  }
  e.bins = BinSet(std::move(occupied));
  return e;
}

EffectiveHamiltonian build_explicit_hamiltonian(const ExplicitEnsemble& ensemble, const OracleLimits& limits) {
  const ModelSpec& spec = ensemble.spec;
  const std::size_t n_mol = ensemble.size();
  const std::size_t n_vib = ensemble.n_vib;
  if (n_mol == 0 || n_mol > limits.max_molecules) throw std::length_error("build_explicit_hamiltonian: bad molecule count");

  std::size_t sector = 1;
  for (std::size_t j = 0; j < n_mol; ++j) sector *= n_vib;
  const std::size_t dim = (1 + 2 * n_mol) * sector;
  if (dim > limits.max_dimension)
    throw std::length_error("build_explicit_hamiltonian: dimension " + std::to_string(dim) + " exceeds cap " +
                            std::to_string(limits.max_dimension));

  std::vector<std::size_t> stride(n_mol, 1);
  for (std::size_t j = 1; j < n_mol; ++j) stride[j] = stride[j - 1] * n_vib;
  auto digit = [&](std::size_t local, std::size_t j) { return (local / stride[j]) % n_vib; };
  auto phonons = [&](std::size_t local) {
    std::size_t total = 0;
    for (std::size_t j = 0; j < n_mol; ++j) total += digit(local, j);
    return total;
  };
  // Block 0 is the photon; block 1 + kind * N + j is molecule j on surface e_{kind+1}.
  auto block_start = [&](std::size_t kind, std::size_t mol) { return (1 + kind * n_mol + mol) * sector; };

  EffectiveHamiltonian h;
  h.engine = Engine::Explicit;
  h.labels.resize(dim);
  std::vector<Eigen::Triplet<cplx>> t;
  auto push = [&](std::size_t r, std::size_t c, cplx v) {
    if (v != cplx{}) t.emplace_back(Eigen::Index(r), Eigen::Index(c), v);
  };

  for (std::size_t local = 0; local < sector; ++local) {
    push(local, local, cplx{spec.omega_c + spec.omega_nu * double(phonons(local)), -0.5 * spec.kappa});
    h.labels[local] = {StateKind::Photon, 0, 0};
  }
  for (std::size_t kind = 0; kind < 2; ++kind) {
    const double s = kind == 0 ? spec.s1 : spec.s2;
    for (std::size_t j = 0; j < n_mol; ++j) {
      const std::size_t bin = ensemble.molecule_bin[j];
      const double offset = ensemble.bins[bin].omega0 + (kind == 1 ? spec.delta2 : 0.0);
      for (std::size_t local = 0; local < sector; ++local) {
        const std::size_t row = block_start(kind, j) + local;
        const std::size_t n = digit(local, j);
        const double spectators = double(phonons(local) - n);
        push(row, row, offset + spec.omega_nu * (double(n) + s * s + spectators));
        if (n + 1 < n_vib) {
          const double off = -spec.omega_nu * s * std::sqrt(double(n + 1));
          push(row, row + stride[j], off);
          push(row + stride[j], row, off);
        }
        if (kind == 0) {
          push(row, local, ensemble.g);
          push(local, row, ensemble.g);
          push(row, block_start(1, j) + local, spec.v12);
          push(block_start(1, j) + local, row, spec.v12);
        }
        h.labels[row] = {kind == 0 ? StateKind::E1 : StateKind::E2, bin, n};
      }
    }
  }

  h.matrix.resize(Eigen::Index(dim), Eigen::Index(dim));
  h.matrix.setFromTriplets(t.begin(), t.end());
  h.matrix.makeCompressed();
  h.kappa = spec.kappa;
  h.n_bins = ensemble.bins.size();
  h.n_vib = n_vib;
  h.photon_fc = 0;
  h.fc_sites.assign(h.n_bins, {});
  for (std::size_t i = 0; i < h.n_bins; ++i) h.bin_weights.push_back(ensemble.bins[i].weight);
  for (std::size_t j = 0; j < n_mol; ++j) h.fc_sites[ensemble.molecule_bin[j]].push_back(block_start(0, j));
  return h;
}

RunObservables run_with_populations(const EffectiveHamiltonian& h, const StateVector& psi0,
                                    const PropagationOptions& options) {
  PopulationAccumulator acc(h);
  PropagationOptions opts = options;
  StateObserver user = options.observer;
  StateObserver pops = acc.observer();
  opts.observer = [&](std::size_t k, double t, const StateVector& psi) {
    pops(k, t, psi);
    if (user) user(k, t, psi);
  };
  RunObservables out;
  out.trajectory = propagate(h, psi0, opts);
  out.populations = acc.take();
  return out;
}

DeviationReport compare_runs(const RunObservables& a, const RunObservables& b) {
  const auto& ra = a.populations.rows;
  const auto& rb = b.populations.rows;
  if (ra.size() != rb.size() || a.trajectory.size() != b.trajectory.size() || ra.size() != a.trajectory.size())
    throw std::invalid_argument("compare_runs: mismatched time grids");
  if (ra.empty()) throw std::invalid_argument("compare_runs: empty runs");
  if (ra.front().e1.size() != rb.front().e1.size()) throw std::invalid_argument("compare_runs: mismatched bin counts");

  DeviationReport rep;
  auto update = [](Deviation& d, double value, bool last) {
    d.max = std::max(d.max, value);
    if (last) d.final = value;
  };
  for (std::size_t k = 0; k < ra.size(); ++k) {
    if (std::abs(ra[k].time - rb[k].time) > 1e-9 * std::max(1.0, ra[k].time))
      throw std::invalid_argument("compare_runs: mismatched time grids");
    const bool last = k + 1 == ra.size();
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < ra[k].e1.size(); ++i) {
      e1 = std::max(e1, std::abs(ra[k].e1[i] - rb[k].e1[i]));
      e2 = std::max(e2, std::abs(ra[k].e2[i] - rb[k].e2[i]));
    }
    update(rep.photon, std::abs(ra[k].photon - rb[k].photon), last);
    update(rep.e1_bin, e1, last);
    update(rep.e2_bin, e2, last);
    update(rep.e1_total, std::abs(ra[k].e1_total - rb[k].e1_total), last);
    update(rep.e2_total, std::abs(ra[k].e2_total - rb[k].e2_total), last);
    update(rep.autocorrelation, std::abs(a.trajectory.autocorrelation[k] - b.trajectory.autocorrelation[k]), last);
  }
  return rep;
}

DeviationReport compare_to_cute(const ExplicitEnsemble& ensemble, const InitialState& init,
                                const PropagationOptions& options, const OracleLimits& limits) {
  const EffectiveHamiltonian explicit_h = build_explicit_hamiltonian(ensemble, limits);
  const EffectiveHamiltonian cute_h = build_effective_hamiltonian(ensemble.spec, ensemble.bins, ensemble.n_vib);
  const RunObservables a = run_with_populations(explicit_h, make_initial_state(init, explicit_h), options);
  const RunObservables b = run_with_populations(cute_h, make_initial_state(init, cute_h), options);
  return compare_runs(a, b);
}

DeviationReport compare_multibin_to_cute(const ModelSpec& spec, const BinSet& bins, std::size_t n_vib,
                                         const InitialState& init, const PropagationOptions& options) {
  const EffectiveHamiltonian multi = build_multibin_hamiltonian(spec, bins, n_vib);
  const EffectiveHamiltonian single = build_effective_hamiltonian(spec, bins, n_vib);
  const RunObservables a = run_with_populations(multi, make_initial_state(init, multi), options);
  const RunObservables b = run_with_populations(single, make_initial_state(init, single), options);
  return compare_runs(a, b);
}

}  // namespace polariton
