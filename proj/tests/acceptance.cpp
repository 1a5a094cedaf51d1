// Acceptance gate: one PASS/FAIL line per criterion with the measured values
// and the wall time against its budget. Exit status is the number of failures.

#include "support.hpp"

#include "polariton/config.hpp"
#include "polariton/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace polariton;
using namespace polariton::cli;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

RunConfig preset(const std::string& name) {
  RawConfig raw;
  raw.merge_text(*find_preset(name), name);
  RunConfig c = parse_config(raw);
  c.sweep = {};
  return c;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Strictly increasing over the central half of the bins.
bool increasing_over_central_half(const std::vector<double>& v, std::string& shown) {
  const std::size_t lo = v.size() / 4, hi = v.size() - v.size() / 4;
  bool ok = hi > lo + 1;
  for (std::size_t i = lo; i < hi; ++i) {
    shown += fmt("%s%.4g", i == lo ? "" : " ", v[i]);
    if (i > lo && !(v[i] > v[i - 1])) ok = false;
  }
  shown += fmt(" (bins %zu..%zu of %zu)", lo, hi - 1, v.size());
  return ok;
}

Outcome jaynes_cummings() {
  ModelSpec spec;
  spec.s1 = 0.0;
  spec.v12 = 0.0;
  spec.kappa = 0.0;
  spec.omega_c = spec.omega0;
  spec.coupling = 0.03;
  const EffectiveHamiltonian h = build_effective_hamiltonian(spec, discretize_disorder(spec, 1), 20);
  PropagationOptions o;
  o.t_final = 30.0 * au_per_fs;
  o.tolerance = 1e-10;
  PopulationAccumulator acc(h);
  o.observer = acc.observer();
  propagate(h, make_initial_state(InitialState::photonic(), h), o);
  double worst = 0.0;
  for (const PopulationRow& row : acc.record().rows) {
    const double c = std::cos(spec.coupling * row.time);
    worst = std::max(worst, std::abs(row.photon - c * c));
  }

  RunConfig lossy;
  lossy.model = spec;
  lossy.model.kappa = 0.006;
  lossy.n_bins = 1;
  lossy.n_vib = 20;
  const SpectrumResult s = compute_spectrum(lossy);
  if (!s.rabi) return {false, "no doublet in the spectrum"};
  const double lower = s.spectrum.omega[s.rabi->lower], upper = s.spectrum.omega[s.rabi->upper];
  const double dl = std::abs(lower - (spec.omega_c - spec.coupling));
  const double du = std::abs(upper - (spec.omega_c + spec.coupling));
  const double step = 1e-4 + 1e-12;
  return {worst < 1e-6 && dl <= step && du <= step,
          fmt("max|P_ph - cos^2(Gt)| = %.2e; peaks %.5f, %.5f (offsets %.1e, %.1e; kappa = 0.006)", worst, lower,
              upper, dl, du)};
}

Outcome empty_cavity() {
  RunConfig c;
  c.model.coupling = 0.0;
  c.model.kappa = 0.006;
  c.t_final = 200.0 * au_per_fs;
  c.n_bins = 1;
  const SpectrumResult s = compute_spectrum(c);
  const double worst = max_abs(s.spectrum.absorbance);
  return {worst < 1e-4, fmt("max|A| = %.2e over %zu grid points", worst, s.spectrum.omega.size())};
}

Outcome dual_path() {
  ModelSpec spec;
  spec.sigma = 0.02;
  const BinSet bins = discretize_disorder(spec, 4);
  const std::size_t n_vib = 20;
  const EffectiveHamiltonian h = build_effective_hamiltonian(spec, bins, n_vib);
  double worst = 0.0;
  for (const InitialState& init : {InitialState::photonic(), InitialState::bright()}) {
    PropagationOptions o;
    o.t_final = 30.0 * au_per_fs;
    o.tolerance = 1e-10;
    o.snapshot_stride = 1;
    const StateVector psi0 = make_initial_state(init, h);
    const PopulationRecord a = populations(propagate(h, psi0, o), h);
    const PopulationRecord b = populations(propagate_eom(spec, bins, n_vib, psi0, o), h);
    if (a.rows.size() != b.rows.size()) return {false, "record grids differ"};
    for (std::size_t k = 0; k < a.rows.size(); ++k)
      for (std::size_t i = 0; i < bins.size(); ++i)
        worst = std::max({worst, std::abs(a.rows[k].e1[i] - b.rows[k].e1[i]),
                          std::abs(a.rows[k].e2[i] - b.rows[k].e2[i]), std::abs(a.rows[k].photon - b.rows[k].photon)});
  }
  return {worst < 1e-8, fmt("max per-bin population difference %.2e (photonic and bright starts)", worst)};
}

Outcome shared_coordinate() {
  ModelSpec spec;
  spec.sigma = 0.02;
  const BinSet bins = discretize_disorder(spec, 2);
  PropagationOptions o;
  o.t_final = 15.0 * au_per_fs;
  o.tolerance = 1e-10;
  double worst = 0.0;
  for (const InitialState& init : {InitialState::photonic(), InitialState::bright()}) {
    const DeviationReport d = compare_multibin_to_cute(spec, bins, 8, init, o);
    worst = std::max({worst, d.e1_bin.max, d.e2_bin.max, d.photon.max});
  }
  return {worst < 1e-8, fmt("max per-bin population difference %.2e (photonic and bright starts)", worst)};
}

Outcome finite_n() {
  const OracleReport r = compute_oracle(preset("oracle"));
  std::string shown;
  bool ok = r.explicit_rows.size() == 3;
  for (std::size_t k = 0; k < r.explicit_rows.size(); ++k) {
    const OracleRow& row = r.explicit_rows[k];
    shown += fmt("%sN=%zu: %.3e", k ? ", " : "", row.molecules, row.deviation.e1_total.max);
    if (k > 0 && !(row.deviation.e1_total.max < r.explicit_rows[k - 1].deviation.e1_total.max)) ok = false;
  }
  return {ok, "max_t |dP_e1| " + shown};
}

Outcome bin_rule() {
  const ConvergeReport r = compute_converge(preset("figS1"));
  const ConvergeLevel *half = nullptr, *twice = nullptr;
  std::string shown;
  for (const ConvergeLevel& l : r.levels) {
    if (l.n_bins == r.rule / 2) half = &l;
    if (l.n_bins == 2 * r.rule) twice = &l;
    shown += fmt(" %zu:%.5g", l.n_bins, l.ratio_final);
  }
  if (!half || !twice) return {false, "missing levels"};
  const double h = std::abs(half->ratio_change), t = std::abs(twice->ratio_change);
  return {t < 0.01 && h > t,
          fmt("rule %zu; ratio change at %zu bins %.3e, at %zu bins %.3e; ratios", r.rule, half->n_bins, h,
              twice->n_bins, t) + shown};
}

Outcome disorder_spectra() {
  RunConfig c = preset("fig3a");
  c.model.sigma = 0.0;
  const SpectrumResult clean = compute_spectrum(c);
  c.model.sigma = 0.02;
  const SpectrumResult rough = compute_spectrum(c);
  if (!clean.rabi || !rough.rabi) return {false, "no doublet in a spectrum"};
  // Finite-window ripple can split one band into two maxima, so the separation
  // of the strongest maximum on each side of the cavity line must grow as well.
  auto band_split = [&](const Spectrum& sp) {
    std::size_t lo = 0, hi = 0;
    double a_lo = -1.0, a_hi = -1.0;
    for (std::size_t k : local_maxima(sp)) {
      if (sp.omega[k] < c.model.omega_c && sp.absorbance[k] > a_lo) a_lo = sp.absorbance[lo = k];
      if (sp.omega[k] > c.model.omega_c && sp.absorbance[k] > a_hi) a_hi = sp.absorbance[hi = k];
    }
    return sp.omega[hi] - sp.omega[lo];
  };
  const double band_clean = band_split(clean.spectrum), band_rough = band_split(rough.spectrum);
  return {rough.rabi->splitting > clean.rabi->splitting && rough.rabi->side_peak < clean.rabi->side_peak &&
              band_rough > band_clean,
          fmt("splitting %.4f -> %.4f, side peak %.4g -> %.4g, LP-UP band maxima %.4f -> %.4f (2 sigma 0 -> 0.04, "
              "%zu bins)",
              clean.rabi->splitting, rough.rabi->splitting, clean.rabi->side_peak, rough.rabi->side_peak, band_clean,
              band_rough, rough.bins.size())};
}

double final_product(RunConfig c, double coupling, double sigma) {
  c.model.coupling = coupling;
  c.model.sigma = sigma;
  return compute_dynamics(c).populations.rows.back().e2_total;
}

Outcome polaron_decoupling() {
  const RunConfig c = preset("fig4a");
  const double bare = final_product(c, 0.0, 0.0);
  const double clean = final_product(c, 0.03, 0.0);
  const double rough = final_product(c, 0.03, 0.04);
  return {std::abs(rough - bare) < std::abs(clean - bare) && clean < bare,
          fmt("P_e2(T_f): G=0 %.5f, G=0.03 sigma=0 %.5f, G=0.03 2sigma=0.08 %.5f", bare, clean, rough)};
}

Outcome narrowband() {
  RunConfig c = preset("fig6");
  c.initial = InitialState::upper();
  const DynamicsResult up = compute_dynamics(c);
  c.initial = InitialState::lower();
  const DynamicsResult low = compute_dynamics(c);
  const double pu = up.populations.rows.back().e2_total, pl = low.populations.rows.back().e2_total;
  const PopulationRow& last = up.populations.rows.back();
  std::vector<double> reactivity;
  for (std::size_t i = 0; i < last.e1.size(); ++i) reactivity.push_back(last.e2[i] / (last.e1[i] + last.e2[i]));
  std::string shown;
  const bool trend = increasing_over_central_half(reactivity, shown);
  return {pu > pl && trend, fmt("P_e2(T_f) upper %.5f, lower %.5f; upper reactivity ", pu, pl) + shown};
}

Outcome vib_gradient() {
  const DynamicsResult r = compute_dynamics(preset("figS4"));
  std::vector<double> energy;
  for (const VibEnergyRow& row : r.vib_energy) {
    if (!row.energy) return {false, fmt("bin %zu has no reactant population", row.bin)};
    energy.push_back(*row.energy);
  }
  if (energy.empty()) return {false, "no snapshot"};
  std::string shown;
  const bool ok = increasing_over_central_half(energy, shown);
  return {ok, fmt("E_vib at %.1f fs: ", r.vib_energy.front().time / au_per_fs) + shown};
}

Outcome invariants() {
  testing::CaseGenerator gen(7);
  const auto scratch = testing::scratch_dir("acceptance_properties");
  testing::PropertyResult worst;
  int failures = 0;
  for (int k = 0; k < 200; ++k) {
    const testing::PropertyResult r = testing::check_properties(gen.next(), gen, scratch);
    const bool ok = r.hermiticity < 1e-15 && r.completeness < 1e-8 && r.norm_law < 1e-7 && r.linearity < 1e-8 &&
                    r.reversibility < 1e-8 && r.deterministic;
    failures += ok ? 0 : 1;
    worst.hermiticity = std::max(worst.hermiticity, r.hermiticity);
    worst.completeness = std::max(worst.completeness, r.completeness);
    worst.norm_law = std::max(worst.norm_law, r.norm_law);
    worst.linearity = std::max(worst.linearity, r.linearity);
    worst.reversibility = std::max(worst.reversibility, r.reversibility);
    worst.deterministic = worst.deterministic && r.deterministic;
  }
  std::filesystem::remove_all(scratch);
  return {failures == 0,
          fmt("200 cases, %d failing; worst hermiticity %.1e, completeness %.1e, norm law %.1e, linearity %.1e, "
              "reversibility %.1e, csv %s",
              failures, worst.hermiticity, worst.completeness, worst.norm_law, worst.linearity, worst.reversibility,
              worst.deterministic ? "identical" : "differs")};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"Jaynes-Cummings exactness", 1.0, jaynes_cummings},
      {"empty-cavity null", 1.0, empty_cavity},
      {"dual-path equivalence", 30.0, dual_path},
      {"per-bin vs shared coordinate", 60.0, shared_coordinate},
      {"finite-N convergence", 300.0, finite_n},
      {"bin-count rule", 300.0, bin_rule},
      {"disorder phenomenology", 300.0, disorder_spectra},
      {"polaron decoupling and its loss", 600.0, polaron_decoupling},
      {"narrowband asymmetry", 600.0, narrowband},
      {"vibrational-energy gradient", 300.0, vib_gradient},
      {"invariant suite", 120.0, invariants},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const Criterion& c = criteria[k];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = out.pass && seconds < c.budget_s;
    failed += pass ? 0 : 1;
    std::printf("%s %2zu %s: %s [%.2f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", k + 1, c.name, out.detail.c_str(),
                seconds, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
