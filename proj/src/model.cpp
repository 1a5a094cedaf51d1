// model.cpp: parameter validation, disorder discretization, basis indexing

#include "polariton/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polariton {

double time_convert(double value, TimeUnit unit) {
  if (!(value >= 0.0)) throw std::invalid_argument("time_convert: negative or non-finite time");
  return unit == TimeUnit::fs ? value * au_per_fs : value;
}

double time_convert(double value, std::string_view unit) {
  if (unit == "fs") return time_convert(value, TimeUnit::fs);
  if (unit == "au") return time_convert(value, TimeUnit::au);
  throw std::invalid_argument("time_convert: unknown unit '" + std::string(unit) + "'");
}

void ModelSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ModelSpec: ") + what);
  };
  for (double v : {omega0, omega_nu, s1, s2, v12, delta2, omega_c, kappa, coupling, sigma})
    require(std::isfinite(v), "all parameters must be finite");
  require(omega0 > 0.0, "omega0 must be positive");
  require(omega_nu > 0.0, "omega_nu must be positive");
  require(omega_c > 0.0, "omega_c must be positive");
  require(v12 >= 0.0, "v12 must be non-negative");
  require(kappa >= 0.0, "kappa must be non-negative");
  require(coupling >= 0.0, "coupling must be non-negative");
  require(sigma >= 0.0, "sigma must be non-negative");
}

BinSet::BinSet(std::vector<Bin> bins) : bins_(std::move(bins)) {
  if (bins_.empty()) throw std::invalid_argument("BinSet: no bins");
  double total = 0.0;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    const Bin& b = bins_[i];
    if (!(b.weight >= 0.0) || !std::isfinite(b.omega0))
      throw std::invalid_argument("BinSet: invalid weight or frequency");
    if (b.edge_lo > b.omega0 || b.omega0 > b.edge_hi)
      throw std::invalid_argument("BinSet: bin frequency outside its edges");
    if (b.edge_hi > b.edge_lo && !(b.edge_lo < b.omega0 && b.omega0 < b.edge_hi))
      throw std::invalid_argument("BinSet: bin frequency on an edge");
    if (i > 0 && !(bins_[i - 1].omega0 < b.omega0))
      throw std::invalid_argument("BinSet: bins must be ordered by increasing frequency");
    total += b.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("BinSet: weights do not sum to 1");
}

BinSet discretize_disorder(const ModelSpec& spec, std::size_t n_bins) {
  if (n_bins < 1) throw std::invalid_argument("discretize_disorder: n_bins must be >= 1");
  if (!(spec.sigma >= 0.0)) throw std::invalid_argument("discretize_disorder: negative sigma");
  if (spec.sigma == 0.0) {
    if (n_bins > 1)
      throw std::domain_error("discretize_disorder: sigma = 0 is a degenerate distribution, use one bin");
    return BinSet({Bin{1.0, spec.omega0, spec.omega0, spec.omega0}});
  }

  // Work in the standardized variable x = (omega - omega0) / sigma.
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr double tol = 1e-10;
  constexpr unsigned max_depth = 10;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto density = [&](double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); };
  auto moment = [&](double x) { return x * density(x); };

  const double width = 6.0 / static_cast<double>(n_bins);
  std::vector<Bin> bins;
  bins.reserve(n_bins);
  double total = 0.0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double lo = -3.0 + width * static_cast<double>(i);
    const double hi = (i + 1 == n_bins) ? 3.0 : -3.0 + width * static_cast<double>(i + 1);
    const double p = Quadrature::integrate(density, lo, hi, max_depth, tol);
    const double m = Quadrature::integrate(moment, lo, hi, max_depth, tol);
    const double centroid = (n_bins == 1) ? 0.0 : m / p;
    bins.push_back(Bin{p, spec.omega0 + spec.sigma * centroid, spec.omega0 + spec.sigma * lo,
                       spec.omega0 + spec.sigma * hi});
    total += p;
  }
  for (Bin& b : bins) b.weight /= total;
  return BinSet(std::move(bins));
}

std::size_t bin_count_rule(double sigma, double t_final) {
  if (!(sigma >= 0.0) || !(t_final > 0.0))
    throw std::invalid_argument("bin_count_rule: need sigma >= 0 and t_final > 0");
  const double n = std::ceil(6.0 * sigma * t_final / (2.0 * std::numbers::pi));
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

Basis::Basis(std::size_t n_bins, std::size_t n_vib) : n_bins_(n_bins), n_vib_(n_vib) {
  if (n_bins == 0 || n_vib == 0) throw std::invalid_argument("Basis: empty basis");
}

std::size_t Basis::flat(const StateLabel& label) const {
  switch (label.kind) {
    case StateKind::Photon:
      return 0;
    case StateKind::E1:
    case StateKind::E2:
      if (label.bin >= n_bins_ || label.vib >= n_vib_)
        throw std::out_of_range("Basis::flat: label out of range");
      return label.kind == StateKind::E1 ? e1(label.bin, label.vib) : e2(label.bin, label.vib);
  }
  throw std::logic_error("Basis::flat: bad kind");
}

StateLabel Basis::label(std::size_t flat) const {
  if (flat >= dimension()) throw std::out_of_range("Basis::label: index out of range");
  if (flat == 0) return {};
  const std::size_t k = flat - 1;
  const std::size_t block = k / n_vib_;
  const std::size_t vib = k % n_vib_;
  if (block < n_bins_) return {StateKind::E1, block, vib};
  return {StateKind::E2, block - n_bins_, vib};
}

}  // namespace polariton
