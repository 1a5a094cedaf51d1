// support.hpp: shared test oracles, generators and property checks

#pragma once

#include "polariton/csv.hpp"
#include "polariton/hamiltonian.hpp"
#include "polariton/model.hpp"
#include "polariton/observables.hpp"
#include "polariton/propagator.hpp"
#include "polariton/runs.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using polariton::cplx;
using polariton::StateVector;

// exp(-i H t) psi through the eigendecomposition of the dense matrix; an
// independent route from the Krylov propagator.
class DenseEvolution {
 public:
  explicit DenseEvolution(const polariton::SparseMatrix& h) {
    const Eigen::MatrixXcd dense(h);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dense);
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
    inverse_ = vectors_.inverse();
  }

  StateVector apply(const StateVector& psi, double t) const {
    Eigen::VectorXcd c = inverse_ * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(cplx{0.0, -t} * values_[k]);
    return vectors_ * c;
  }

 private:
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXcd values_;
  Eigen::MatrixXcd inverse_;
};

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Closed-form bin weights and conditional means for equal-width bins over +-3 sigma.
struct ClosedFormBin {
  double weight;
  double omega0;
};
inline std::vector<ClosedFormBin> closed_form_bins(double omega0, double sigma, std::size_t n) {
  std::vector<ClosedFormBin> out;
  const double total = cdf(3.0) - cdf(-3.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -3.0 + 6.0 * double(i) / double(n);
    const double b = -3.0 + 6.0 * double(i + 1) / double(n);
    const double mass = cdf(b) - cdf(a);
    out.push_back({mass / total, omega0 + sigma * (phi(a) - phi(b)) / mass});
  }
  return out;
}

// Small random configurations for the invariant suite.
struct RandomCase {
  polariton::ModelSpec spec;
  std::size_t n_bins{1};
  std::size_t n_vib{2};
  double t_final{0.0};
  double dt{1.0};
};

class CaseGenerator {
 public:
  explicit CaseGenerator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  RandomCase next() {
    RandomCase c;
    c.spec.omega0 = uniform(0.08, 0.12);
    c.spec.omega_nu = uniform(0.005, 0.015);
    c.spec.s1 = uniform(-1.5, 1.5);
    c.spec.s2 = uniform(-2.5, 2.5);
    c.spec.v12 = uniform(0.0, 0.005);
    c.spec.delta2 = uniform(-0.02, 0.02);
    c.spec.omega_c = uniform(0.08, 0.13);
    c.spec.kappa = uniform(0.0, 0.01);
    c.spec.coupling = uniform(0.0, 0.04);
    c.n_bins = integer(1, 4);
    c.spec.sigma = c.n_bins == 1 && integer(0, 1) == 0 ? 0.0 : uniform(0.002, 0.03);
    c.n_vib = integer(2, 10);
    c.dt = uniform(0.5, 4.0);
    c.t_final = c.dt * double(integer(20, 80));
    return c;
  }

  StateVector random_state(std::size_t dim) {
    StateVector v(static_cast<Eigen::Index>(dim));
    std::normal_distribution<double> n01;
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = cplx{n01(rng_), n01(rng_)};
    return v / v.norm();
  }

  cplx random_complex() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

 private:
  std::mt19937_64 rng_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("polsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Outcome of one invariant on one random case: worst violation observed.
struct PropertyResult {
  double hermiticity{0.0};
  double completeness{0.0};
  double norm_law{0.0};
  double linearity{0.0};
  double reversibility{0.0};
  bool deterministic{true};
};

// H - H^dag must equal -i kappa on the photon diagonal and vanish elsewhere.
inline double hermiticity_violation(const polariton::EffectiveHamiltonian& h) {
  const Eigen::MatrixXcd dense(h.matrix);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(dense.rows(), dense.cols());
  for (std::size_t k = 0; k < h.labels.size(); ++k)
    if (h.labels[k].kind == polariton::StateKind::Photon)
      expected(Eigen::Index(k), Eigen::Index(k)) = cplx{0.0, -h.kappa};
  const Eigen::MatrixXcd herm(polariton::hermitian_part(h));
  return std::max((dense - dense.adjoint() - expected).cwiseAbs().maxCoeff(),
                  (herm - herm.adjoint()).cwiseAbs().maxCoeff());
}

inline PropertyResult check_properties(const RandomCase& c, CaseGenerator& gen, const std::filesystem::path& scratch) {
  using namespace polariton;
  PropertyResult r;
  const BinSet bins = discretize_disorder(c.spec, c.n_bins);
  const EffectiveHamiltonian h = build_effective_hamiltonian(c.spec, bins, c.n_vib);
  r.hermiticity = hermiticity_violation(h);

  PropagationOptions o;
  o.dt_record = c.dt;
  o.t_final = c.t_final;
  o.tolerance = 1e-10;
  o.snapshot_stride = 1;

  // Completeness and the norm law on a random mixture of photon and bright state.
  const StateVector psi0 = gen.random_state(h.dimension());
  const Trajectory tr = propagate(h, psi0, o);
  const PopulationRecord rec = populations(tr, h);
  for (const PopulationRow& row : rec.rows) {
    const double sum = row.photon + row.e1_total + row.e2_total + row.leakage();
    r.completeness = std::max(r.completeness, std::abs(sum - 1.0));
    for (double p : {row.photon, row.e1_total, row.e2_total, row.leakage()})
      if (p < -1e-10 || p > 1.0 + 1e-10) r.completeness = std::max(r.completeness, 1.0);
  }
  {
    // d<psi|psi>/dt = -kappa * photon, checked in integral form with a fine
    // composite Simpson rule over each record interval.
    PropagationOptions fine = o;
    fine.snapshot_stride = 1;
    const double sub = c.dt / 16.0;
    fine.dt_record = sub;
    const Trajectory ft = propagate(h, psi0, fine);
    const PopulationRecord fr = populations(ft, h);
    double integral = 0.0;
    for (std::size_t k = 0; k + 2 < fr.rows.size(); k += 2) {
      const double step = fr.rows[k + 2].time - fr.rows[k].time;
      integral += step / 6.0 * (fr.rows[k].photon + 4.0 * fr.rows[k + 1].photon + fr.rows[k + 2].photon);
      const double predicted = fr.rows.front().norm2 - c.spec.kappa * integral;
      r.norm_law = std::max(r.norm_law, std::abs(predicted - fr.rows[k + 2].norm2));
    }
  }

  // Linearity.
  {
    const StateVector a = gen.random_state(h.dimension());
    const StateVector b = gen.random_state(h.dimension());
    const cplx alpha = gen.random_complex(), beta = gen.random_complex();
    PropagationOptions lo = o;
    lo.snapshot_stride = 0;
    auto final_state = [&](const StateVector& psi) {
      PropagationOptions last = lo;
      StateVector out;
      last.observer = [&](std::size_t, double, const StateVector& s) { out = s; };
      propagate(h, psi, last);
      return out;
    };
    const StateVector lhs = final_state(alpha * a + beta * b);
    const StateVector rhs = alpha * final_state(a) + beta * final_state(b);
    r.linearity = (lhs - rhs).norm();
  }

  // Reversibility without loss: forward under H, back under -H.
  {
    ModelSpec lossless = c.spec;
    lossless.kappa = 0.0;
    EffectiveHamiltonian fwd = build_effective_hamiltonian(lossless, bins, c.n_vib);
    EffectiveHamiltonian bwd = fwd;
    bwd.matrix = -fwd.matrix;
    StateVector mid, back;
    PropagationOptions ro = o;
    ro.snapshot_stride = 0;
    ro.observer = [&](std::size_t, double, const StateVector& s) { mid = s; };
    propagate(fwd, psi0, ro);
    ro.observer = [&](std::size_t, double, const StateVector& s) { back = s; };
    propagate(bwd, mid, ro);
    r.reversibility = (back - psi0).norm();
  }

  // Determinism of the written CSV files.
  {
    polariton::cli::RunConfig cfg;
    cfg.model = c.spec;
    cfg.n_bins = c.n_bins;
    cfg.n_vib = c.n_vib;
    cfg.t_final = c.t_final;
    cfg.dt_record = c.dt;
    cfg.initial = InitialState::bright();
    cfg.snapshot_times = {0.5 * c.t_final};
    const auto d1 = scratch / "a", d2 = scratch / "b";
    cfg.output_dir = d1.string();
    polariton::cli::run_dynamics(cfg);
    cfg.output_dir = d2.string();
    polariton::cli::run_dynamics(cfg);
    for (const char* f : {"populations.csv", "vib_energy.csv", "yield.csv", "bins.csv"})
      if (read_file(d1 / f) != read_file(d2 / f) || read_file(d1 / f).empty()) r.deterministic = false;
  }
  return r;
}

}  // namespace testing
