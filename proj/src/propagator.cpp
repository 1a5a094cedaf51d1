// propagator.cpp: Krylov propagation with error-integral step control

#include "polariton/propagator.hpp"
#include "recorder.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace polariton {

namespace detail {

void check_options(const PropagationOptions& o) {
  if (!(o.tolerance >= 1e-12 && o.tolerance <= 1e-6))
    throw std::invalid_argument("propagate: tolerance must lie in [1e-12, 1e-6]");
  record_count(o.dt_record, o.t_final);
}

Recorder::Recorder(const StateVector& psi0, const PropagationOptions& options) : options_(options) {
  const std::size_t n = record_count(options.dt_record, options.t_final);
  traj_.initial_state = psi0;
  traj_.times.reserve(n);
  traj_.autocorrelation.reserve(n);
  traj_.norms2.reserve(n);
}

double Recorder::time_of(std::size_t k) const { return record_time(k, options_.dt_record, options_.t_final); }

void Recorder::record(std::size_t k, const StateVector& psi) {
  const double t = time_of(k);
  traj_.times.push_back(t);
  traj_.autocorrelation.push_back(traj_.initial_state.dot(psi));
  traj_.norms2.push_back(psi.squaredNorm());
  if (options_.snapshot_stride > 0 && k % options_.snapshot_stride == 0) {
    traj_.snapshot_indices.push_back(k);
    traj_.snapshots.push_back(psi);
  }
  if (options_.observer) options_.observer(k, t, psi);
}

}  // namespace detail

std::size_t record_count(double dt_record, double t_final) {
  if (!(dt_record > 0.0) || !(t_final >= 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("record grid: need dt_record > 0 and t_final >= 0");
  const double steps = t_final / dt_record;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) <= 1e-9 * std::max(1.0, steps)) return static_cast<std::size_t>(rounded) + 1;
  return static_cast<std::size_t>(std::floor(steps)) + 2;
}

double record_time(std::size_t k, double dt_record, double t_final) {
  const std::size_t n = record_count(dt_record, t_final);
  if (k + 1 >= n) return t_final;
  return static_cast<double>(k) * dt_record;
}

StateVector make_initial_state(const InitialState& init, const EffectiveHamiltonian& h) {
  StateVector psi = StateVector::Zero(Eigen::Index(h.dimension()));
  auto put_bins = [&](cplx scale, const std::vector<cplx>* amplitudes) {
    for (std::size_t i = 0; i < h.fc_sites.size(); ++i) {
      const auto& sites = h.fc_sites[i];
      if (sites.empty()) continue;
      const cplx a = amplitudes ? (*amplitudes)[i] : cplx{std::sqrt(h.bin_weights[i]), 0.0};
      for (std::size_t site : sites) psi[Eigen::Index(site)] = scale * a / std::sqrt(double(sites.size()));
    }
  };
  const double r = 1.0 / std::sqrt(2.0);
  switch (init.kind) {
    case InitialKind::Photonic:
      psi[Eigen::Index(h.photon_fc)] = 1.0;
      break;
    case InitialKind::Bright:
      put_bins(1.0, nullptr);
      break;
    case InitialKind::UpperPolariton:
    case InitialKind::LowerPolariton:
      psi[Eigen::Index(h.photon_fc)] = r;
      put_bins(init.kind == InitialKind::UpperPolariton ? r : -r, nullptr);
      break;
    case InitialKind::Custom:
      if (init.custom_bins.size() != h.fc_sites.size())
        throw std::invalid_argument("make_initial_state: custom amplitudes do not match bin count");
      psi[Eigen::Index(h.photon_fc)] = init.custom_photon;
      put_bins(1.0, &init.custom_bins);
      break;
  }
  if (std::abs(psi.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("make_initial_state: initial state is not normalized");
  return psi;
}

namespace {

constexpr std::size_t krylov_start = 12;
constexpr std::size_t krylov_growth = 6;
constexpr std::size_t krylov_max = 48;
constexpr int substeps_per_segment = 8;
// Fraction of the per-unit-time error budget spent by the step control.
constexpr double safety = 0.5;

class Arnoldi {
 public:
  Arnoldi(const SparseMatrix& a, double shift, std::size_t m_max)
      : a_(a), shift_(shift), m_max_(m_max),
        v_(a.rows(), Eigen::Index(m_max + 1)),
        h_(Eigen::MatrixXcd::Zero(Eigen::Index(m_max + 1), Eigen::Index(m_max))) {
    anorm_ = 0.0;
    for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
      double row = 0.0;
      for (SparseMatrix::InnerIterator it(a, r); it; ++it)
        row += std::abs(it.value() - (it.col() == r ? cplx{shift, 0.0} : cplx{}));
      anorm_ = std::max(anorm_, row);
    }
  }

  void reset(const StateVector& psi) {
    beta_ = psi.norm();
    m_ = 0;
    breakdown_ = false;
    h_.setZero();
    v_.col(0) = psi / beta_;
  }

  void extend_to(std::size_t target) {
    target = std::min(target, m_max_);
    while (m_ < target && !breakdown_) {
      const Eigen::Index j = Eigen::Index(m_);
      w_ = a_ * v_.col(j) - shift_ * v_.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          const cplx c = v_.col(i).dot(w_);
          h_(i, j) += c;
          w_ -= c * v_.col(i);
        }
      }
      const double next = w_.norm();
      ++m_;
      if (next <= 1e-14 * std::max(anorm_, 1e-300)) {
        breakdown_ = true;
        h_(j + 1, j) = 0.0;
      } else {
        h_(j + 1, j) = next;
        v_.col(j + 1) = w_ / next;
      }
    }
  }

  std::size_t size() const { return m_; }
  bool exhausted() const { return breakdown_ || m_ >= m_max_; }
  double beta() const { return beta_; }
  double residual() const { return breakdown_ ? 0.0 : std::abs(h_(Eigen::Index(m_), Eigen::Index(m_ - 1))); }
  Eigen::MatrixXcd projected() const { return h_.topLeftCorner(Eigen::Index(m_), Eigen::Index(m_)); }
  StateVector lift(const Eigen::VectorXcd& y) const { return beta_ * (v_.leftCols(Eigen::Index(m_)) * y); }

 private:
  const SparseMatrix& a_;
  double shift_;
  std::size_t m_max_;
  Eigen::MatrixXcd v_;
  Eigen::MatrixXcd h_;
  StateVector w_;
  double anorm_{0.0};
  double beta_{0.0};
  std::size_t m_{0};
  bool breakdown_{false};
};

// Result of marching exp(-i s H_m) e1 across consecutive segment ends.
struct March {
  std::size_t reached{0};                // number of segment ends within budget
  std::vector<Eigen::VectorXcd> coeffs;  // Krylov coefficients at each reached end
};

// Error bound for the Krylov approximation on [0, s]:
//   beta * h_{m+1,m} * int_0^s |e_m^T exp(-i u H_m) e_1| du,
// integrated with an upper Riemann sum on a uniform sub-grid per segment.
March march(const Arnoldi& kr, const std::vector<double>& ends, double start, double rate) {
  March out;
  const Eigen::MatrixXcd hm = kr.projected();
  const Eigen::Index m = hm.rows();
  const double scale = kr.beta() * kr.residual();
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(m);
  y(0) = 1.0;
  double err = 0.0;
  double t = start;
  double cached_delta = -1.0;
  Eigen::MatrixXcd step;
  for (double end : ends) {
    const double delta = (end - t) / substeps_per_segment;
    if (delta != cached_delta) {
      const Eigen::MatrixXcd arg = cplx{0.0, -delta} * hm;
      step = arg.exp();
      cached_delta = delta;
    }
    for (int k = 0; k < substeps_per_segment; ++k) {
      const double before = std::abs(y(m - 1));
      y = step * y;
      err += scale * delta * std::max(before, std::abs(y(m - 1)));
    }
    t = end;
    if (err > rate * (end - start) || !y.allFinite()) break;
    out.coeffs.push_back(y);
    ++out.reached;
  }
  return out;
}

}  // namespace

Trajectory propagate(const EffectiveHamiltonian& h, const StateVector& psi0, const PropagationOptions& options) {
  detail::check_options(options);
  if (std::size_t(psi0.size()) != h.dimension())
    throw std::invalid_argument("propagate: state dimension does not match Hamiltonian");

  detail::Recorder rec(psi0, options);
  const std::size_t n_records = record_count(options.dt_record, options.t_final);
  rec.record(0, psi0);
  if (n_records == 1) return rec.take();

  // Center the real spectrum; the shift returns as a global phase.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index k = 0; k < h.matrix.rows(); ++k) {
    const double d = h.matrix.coeff(k, k).real();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const double shift = 0.5 * (lo + hi);
  auto phase = [shift](double t) { return std::polar(1.0, -shift * t); };

  const double rate = safety * options.tolerance / options.t_final;
  const std::size_t m_cap = std::min<std::size_t>(krylov_max, h.dimension());
  Arnoldi kr(h.matrix, shift, m_cap);

  StateVector phi = psi0;  // shifted-frame state exp(i shift t) psi(t)
  double t = 0.0;
  std::size_t next = 1;
  std::size_t m_start = std::min(krylov_start, m_cap);
  double fraction = 1.0;  // portion of the way to the next record attempted by the first segment
  std::size_t step_count = 0;

  while (next < n_records) {
    ++step_count;
    if (phi.norm() == 0.0) {
      for (; next < n_records; ++next) rec.record(next, phi);
      break;
    }
    kr.reset(phi);
    kr.extend_to(m_start);

    March result;
    bool partial = false;
    while (true) {
      std::vector<double> ends;
      const double t_next = rec.time_of(next);
      partial = fraction < 1.0;
      if (partial) {
        ends.push_back(t + fraction * (t_next - t));
      } else {
        for (std::size_t k = next; k < n_records; ++k) ends.push_back(rec.time_of(k));
      }
      result = march(kr, ends, t, rate);
      if (result.reached > 0) break;
      if (!kr.exhausted()) {
        kr.extend_to(kr.size() + krylov_growth);
        continue;
      }
      fraction *= 0.5;
      if (fraction * (t_next - t) < 1e-12 * options.t_final)
        throw PropagationError("propagate: tolerance not met by the Krylov error estimate", step_count, t);
    }
    m_start = kr.size();

    if (partial) {
      t += fraction * (rec.time_of(next) - t);
      phi = kr.lift(result.coeffs.back());
      fraction = std::min(1.0, 2.0 * fraction);
    } else {
      for (std::size_t r = 0; r < result.reached; ++r) {
        const double tr = rec.time_of(next);
        StateVector state = kr.lift(result.coeffs[r]);
        if (r + 1 == result.reached) phi = state;
        rec.record(next, phase(tr) * state);
        t = tr;
        ++next;
      }
      fraction = 1.0;
    }
    if (!phi.allFinite()) throw PropagationError("propagate: non-finite amplitudes", step_count, t);
  }
  return rec.take();
}

}  // namespace polariton
