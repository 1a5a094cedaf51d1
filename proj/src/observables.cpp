// observables.cpp

#include "polariton/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polariton {

std::vector<double> default_omega_grid(const ModelSpec& spec, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("default_omega_grid: step must be positive");
  const double lo = spec.omega0 - 3.0 * spec.sigma - 3.0 * spec.coupling;
  const double hi = spec.omega0 + spec.omega_nu + 3.0 * spec.sigma + 3.0 * spec.coupling;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = lo + step * double(k);
  return grid;
}

Spectrum absorption(const Trajectory& traj, double kappa, const std::vector<double>& omega_grid) {
  if (traj.size() < 2) throw std::invalid_argument("absorption: need at least two time samples");
  const StateVector& psi0 = traj.initial_state;
  if (psi0.size() == 0 || std::abs(std::abs(psi0[0]) - 1.0) > 1e-12 || std::abs(psi0.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument("absorption: trajectory must start from the photonic state");
  for (std::size_t k = 1; k < traj.size(); ++k)
    if (!(traj.times[k] > traj.times[k - 1])) throw std::invalid_argument("absorption: time grid not increasing");

  const std::size_t nt = traj.size();
  std::vector<double> weight(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const double left = k > 0 ? traj.times[k] - traj.times[k - 1] : 0.0;
    const double right = k + 1 < nt ? traj.times[k + 1] - traj.times[k] : 0.0;
    weight[k] = 0.5 * (left + right);
  }

  Spectrum out;
  out.omega = omega_grid;
  out.absorbance.resize(omega_grid.size());
  for (std::size_t j = 0; j < omega_grid.size(); ++j) {
    const double w = omega_grid[j];
    cplx transform{0.0, 0.0};
    for (std::size_t k = 0; k < nt; ++k)
      transform += weight[k] * std::polar(1.0, w * traj.times[k]) * traj.autocorrelation[k];
    out.absorbance[j] = kappa * transform.real() - 0.5 * kappa * kappa * std::norm(transform);
  }
  return out;
}

PopulationRow population_row(const StateVector& psi, const EffectiveHamiltonian& h, double time) {
  if (std::size_t(psi.size()) != h.labels.size())
    throw std::invalid_argument("population_row: state dimension does not match Hamiltonian");
  PopulationRow row;
  row.time = time;
  row.e1.assign(h.n_bins, 0.0);
  row.e2.assign(h.n_bins, 0.0);
  for (std::size_t k = 0; k < h.labels.size(); ++k) {
    const double p = std::norm(psi[Eigen::Index(k)]);
    const StateLabel& l = h.labels[k];
    switch (l.kind) {
      case StateKind::Photon: row.photon += p; break;
      case StateKind::E1: row.e1[l.bin] += p; break;
      case StateKind::E2: row.e2[l.bin] += p; break;
    }
  }
  for (std::size_t i = 0; i < h.n_bins; ++i) {
    row.e1_total += row.e1[i];
    row.e2_total += row.e2[i];
  }
  row.norm2 = psi.squaredNorm();
  return row;
}

PopulationRecord populations(const Trajectory& traj, const EffectiveHamiltonian& h) {
  if (traj.snapshots.empty()) throw std::invalid_argument("populations: trajectory has no snapshots");
  PopulationRecord rec;
  rec.rows.reserve(traj.snapshots.size());
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s)
    rec.rows.push_back(population_row(traj.snapshots[s], h, traj.times[traj.snapshot_indices[s]]));
  return rec;
}

StateObserver PopulationAccumulator::observer() {
  return [this](std::size_t, double t, const StateVector& psi) { record_.rows.push_back(population_row(psi, h_, t)); };
}

double vibrational_energy_per_bin(const StateVector& psi, const EffectiveHamiltonian& h,
                                  const ModelSpec& spec, std::size_t bin) {
  if (h.engine != Engine::SingleCoordinate)
    throw std::invalid_argument("vibrational_energy_per_bin: needs the single-coordinate engine");
  if (bin >= h.n_bins) throw std::out_of_range("vibrational_energy_per_bin: bin out of range");
  const Basis basis(h.n_bins, h.n_vib);
  const auto first = Eigen::Index(basis.e1(bin, 0));
  const auto n = Eigen::Index(h.n_vib);
  const StateVector block = psi.segment(first, n);
  const double population = block.squaredNorm();
  if (!(population > 0.0))
    throw std::domain_error("vibrational_energy_per_bin: bin has zero reactant population");

  // <N(s)> with N(s) tridiagonal: diagonal n + s^2, off-diagonal -s sqrt(n+1).
  const double s = spec.s1;
  double expectation = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    expectation += (double(k) + s * s) * std::norm(block[k]);
    if (k + 1 < n)
      expectation += 2.0 * (-s * std::sqrt(double(k + 1))) * (std::conj(block[k]) * block[k + 1]).real();
  }
  return spec.omega_nu * expectation / population;
}

std::vector<std::size_t> local_maxima(const Spectrum& s) {
  std::vector<std::size_t> out;
  const auto& a = s.absorbance;
  for (std::size_t k = 1; k + 1 < a.size(); ++k)
    if (a[k] > a[k - 1] && a[k] > a[k + 1]) out.push_back(k);
  return out;
}

RabiSplitting rabi_splitting(const Spectrum& s) {
  std::vector<std::size_t> peaks = local_maxima(s);
  if (peaks.size() < 2) throw std::domain_error("rabi_splitting: fewer than two local maxima");
  const auto& a = s.absorbance;
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t x, std::size_t y) { return a[x] > a[y]; });

  std::size_t first = peaks[0], second = peaks[1];
  const double top = a[peaks[0]];
  const double runner_up = a[peaks[1]];
  auto separation = [&](std::size_t x, std::size_t y) { return std::abs(s.omega[x] - s.omega[y]); };
  if (runner_up == top) {
    // Several maxima share the top value: take the outermost pair among them.
    std::size_t lo = peaks[0], hi = peaks[0];
    for (std::size_t p : peaks)
      if (a[p] == top) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    first = lo;
    second = hi;
  } else {
    for (std::size_t p : peaks)
      if (a[p] == runner_up && separation(first, p) > separation(first, second)) second = p;
  }

  RabiSplitting out;
  out.lower = std::min(first, second);
  out.upper = std::max(first, second);
  out.splitting = separation(first, second);
  for (std::size_t p : peaks)
    if (p != first && p != second) out.side_peak = std::max(out.side_peak, a[p]);
  return out;
}

YieldReport reaction_yield(const PopulationRecord& record) {
  if (record.rows.empty()) throw std::invalid_argument("reaction_yield: empty population record");
  const PopulationRow& last = record.rows.back();
  YieldReport y;
  y.per_bin = last.e2;
  for (double p : last.e2) y.per_bin_normalized.push_back(p / last.norm2);
  y.total = last.e2_total;
  y.total_normalized = last.e2_normalized();
  y.leakage = last.leakage();
  return y;
}

}  // namespace polariton
