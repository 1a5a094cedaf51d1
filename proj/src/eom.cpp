// eom.cpp: amplitude equations of motion in the vibrational eigenbases
//
// Amplitudes are expanded on the eigenstates phi_l of each truncated displaced
// surface. The cavity couples to e1 through the Franck-Condon sums
// <phi_0|phi_l>, and e1/e2 mix through the overlap matrix <phi_l^(1)|phi_m^(2)>.
// Nothing here touches the sparse Hamiltonian used by propagate().

#include "polariton/propagator.hpp"
#include "recorder.hpp"

#include <boost/numeric/odeint.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace polariton {

namespace {

using State = std::vector<cplx>;

struct SurfaceBasis {
  Eigen::VectorXd levels;   // eigenvalues of N(s), ~ 0, 1, 2, ...
  Eigen::MatrixXd vectors;  // columns: eigenvectors in the Fock basis
};

SurfaceBasis diagonalize(double s, std::size_t n_vib) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(displaced_number_operator(s, n_vib).entries);
  if (solver.info() != Eigen::Success) throw std::runtime_error("propagate_eom: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

class AmplitudeEquations {
 public:
  AmplitudeEquations(const ModelSpec& spec, const BinSet& bins, std::size_t n_vib, double shift)
      : spec_(spec), n_(Eigen::Index(n_vib)), nb_(bins.size()), shift_(shift) {
    const SurfaceBasis b1 = diagonalize(spec.s1, n_vib);
    const SurfaceBasis b2 = diagonalize(spec.s2, n_vib);
    u1_ = b1.vectors;
    u2_ = b2.vectors;
    fc_ = b1.vectors.row(0).transpose().cast<cplx>();
    overlap_ = (b1.vectors.transpose() * b2.vectors).cast<cplx>();
    overlap_t_ = overlap_.transpose();
    for (std::size_t i = 0; i < nb_; ++i) {
      amp_.push_back(spec.coupling * std::sqrt(bins[i].weight));
      e1_.push_back((bins[i].omega0 - shift + spec.omega_nu * b1.levels.array()).matrix().cast<cplx>());
      e2_.push_back(
          (bins[i].omega0 + spec.delta2 - shift + spec.omega_nu * b2.levels.array()).matrix().cast<cplx>());
    }
  }

  std::size_t size() const { return 1 + 2 * nb_ * std::size_t(n_); }

  void operator()(const State& x, State& dxdt, double /*t*/) const {
    using Map = Eigen::Map<const Eigen::VectorXcd>;
    using MutMap = Eigen::Map<Eigen::VectorXcd>;
    const cplx minus_i{0.0, -1.0};
    const cplx a0 = x[0];
    cplx photon = cplx{spec_.omega_c - shift_, -0.5 * spec_.kappa} * a0;
    for (std::size_t i = 0; i < nb_; ++i) {
      Map a1(x.data() + offset1(i), n_);
      Map a2(x.data() + offset2(i), n_);
      MutMap d1(dxdt.data() + offset1(i), n_);
      MutMap d2(dxdt.data() + offset2(i), n_);
      photon += amp_[i] * fc_.dot(a1);
      d1.noalias() = overlap_ * a2;
      d1 = minus_i * (e1_[i].cwiseProduct(a1) + (amp_[i] * a0) * fc_ + spec_.v12 * d1);
      d2.noalias() = overlap_t_ * a1;
      d2 = minus_i * (e2_[i].cwiseProduct(a2) + spec_.v12 * d2);
    }
    dxdt[0] = minus_i * photon;
  }

  // Fock layout <-> eigenbasis layout.
  State to_eigen(const StateVector& psi) const {
    State x(size());
    x[0] = psi[0];
    for (std::size_t i = 0; i < nb_; ++i) {
      Eigen::Map<Eigen::VectorXcd>(x.data() + offset1(i), n_) =
          u1_.transpose().cast<cplx>() * psi.segment(Eigen::Index(offset1(i)), n_);
      Eigen::Map<Eigen::VectorXcd>(x.data() + offset2(i), n_) =
          u2_.transpose().cast<cplx>() * psi.segment(Eigen::Index(offset2(i)), n_);
    }
    return x;
  }

  StateVector to_fock(const State& x) const {
    StateVector psi(static_cast<Eigen::Index>(size()));
    psi[0] = x[0];
    for (std::size_t i = 0; i < nb_; ++i) {
      psi.segment(Eigen::Index(offset1(i)), n_) =
          u1_.cast<cplx>() * Eigen::Map<const Eigen::VectorXcd>(x.data() + offset1(i), n_);
      psi.segment(Eigen::Index(offset2(i)), n_) =
          u2_.cast<cplx>() * Eigen::Map<const Eigen::VectorXcd>(x.data() + offset2(i), n_);
    }
    return psi;
  }

 private:
  std::size_t offset1(std::size_t i) const { return 1 + i * std::size_t(n_); }
  std::size_t offset2(std::size_t i) const { return 1 + (nb_ + i) * std::size_t(n_); }

  ModelSpec spec_;
  Eigen::Index n_;
  std::size_t nb_;
  double shift_;
  Eigen::MatrixXd u1_, u2_;
  Eigen::MatrixXcd overlap_, overlap_t_;
  Eigen::VectorXcd fc_;  // <phi_0 | phi_l^(1)>
  std::vector<double> amp_;
  std::vector<Eigen::VectorXcd> e1_, e2_;
};

}  // namespace

Trajectory propagate_eom(const ModelSpec& spec, const BinSet& bins, std::size_t n_vib,
                         const StateVector& psi0, const PropagationOptions& options) {
  namespace odeint = boost::numeric::odeint;
  detail::check_options(options);
  spec.validate();
  if (n_vib < 2) throw std::invalid_argument("propagate_eom: n_vib must be >= 2");
  const std::size_t dim = 1 + 2 * bins.size() * n_vib;
  if (std::size_t(psi0.size()) != dim)
    throw std::invalid_argument("propagate_eom: state dimension does not match model");

  const double shift = spec.omega0;
  const AmplitudeEquations eqs(spec, bins, n_vib, shift);
  detail::Recorder rec(psi0, options);
  const std::size_t n_records = record_count(options.dt_record, options.t_final);

  std::vector<double> times(n_records);
  for (std::size_t k = 0; k < n_records; ++k) times[k] = rec.time_of(k);

  State x = eqs.to_eigen(psi0);
  std::size_t k = 0;
  auto observe = [&](const State& state, double t) {
    for (const cplx& a : state)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw PropagationError("propagate_eom: non-finite amplitudes", k, t);
    rec.record(k, std::polar(1.0, -shift * times[k]) * eqs.to_fock(state));
    ++k;
  };
  if (n_records == 1) {
    observe(x, 0.0);
    return rec.take();
  }

  // Per-step absolute error target; the global error stays near `tolerance`
  // for the step counts reached on the record grids used here.
  const double eps_abs = 1e-3 * options.tolerance;
  auto stepper = odeint::make_controlled(eps_abs, 0.0, odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::min(options.dt_record, 0.05);
  odeint::integrate_times(stepper, std::cref(eqs), x, times.begin(), times.end(), dt0, observe);
  return rec.take();
}

}  // namespace polariton
