// runs.cpp

#include "polariton/runs.hpp"

#include "polariton/csv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <set>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

namespace polariton::cli {

namespace fs = std::filesystem;

std::string version() { return POLARITON_VERSION; }

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(threads, count));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

struct Setup {
  RunConfig config;
  BinSet bins;
  EffectiveHamiltonian h;
};

Setup resolve(const RunConfig& config) {
  Setup s{config, {}, {}};
  s.config.n_bins = config.resolved_bins();
  if (Basis(*s.config.n_bins, config.n_vib).dimension() > config.max_dimension)
    throw std::length_error("requested basis exceeds max_dimension = " + std::to_string(config.max_dimension));
  s.bins = discretize_disorder(config.model, *s.config.n_bins);
  s.h = build_effective_hamiltonian(config.model, s.bins, config.n_vib, config.max_dimension);
  return s;
}

PropagationOptions propagation_options(const RunConfig& c) {
  PropagationOptions o;
  o.dt_record = c.dt_record;
  o.t_final = c.t_final;
  o.tolerance = c.tolerance;
  return o;
}

std::string bin_tag(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

std::string clean_message(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ch == ',' ? ';' : ' ';
  return s;
}

void log_line(const RunOptions& o, const std::string& text) {
  if (!o.log) return;
  static std::mutex m;
  std::lock_guard lock(m);
  *o.log << text << '\n';
}

void write_manifest(const RunConfig& resolved, const std::string& command) {
  write_text(fs::path(resolved.output_dir) / "manifest.ini",
             "# polsim " + version() + "\n# command: " + command + "\n\n" + echo_config(resolved));
}

void write_bins(const BinSet& bins, const fs::path& dir) {
  CsvTable t({"bin", "weight", "omega0_au", "edge_lo_au", "edge_hi_au"});
  for (std::size_t i = 0; i < bins.size(); ++i)
    t.add({std::to_string(i), csv_number(bins[i].weight), csv_number(bins[i].omega0), csv_number(bins[i].edge_lo),
           csv_number(bins[i].edge_hi)});
  t.write(dir / "bins.csv");
}

void write_trajectory(const Trajectory& traj, const fs::path& dir) {
  CsvTable ac({"t_au", "ReC", "ImC"});
  CsvTable nm({"t_au", "norm2", "gamma"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    ac.add({csv_number(traj.times[k]), csv_number(traj.autocorrelation[k].real()),
            csv_number(traj.autocorrelation[k].imag())});
    nm.add({csv_number(traj.times[k]), csv_number(traj.norms2[k]), csv_number(1.0 - traj.norms2[k])});
  }
  ac.write(dir / "autocorr.csv");
  nm.write(dir / "norms.csv");
}

RunConfig with_bins(const RunConfig& c, const BinSet& bins) {
  RunConfig r = c;
  r.n_bins = bins.size();
  return r;
}

void write_spectrum_files(const RunConfig& config, const SpectrumResult& r) {
  const fs::path dir(config.output_dir);
  CsvTable sp({"omega_au", "A"});
  for (std::size_t j = 0; j < r.spectrum.omega.size(); ++j)
    sp.add({csv_number(r.spectrum.omega[j]), csv_number(r.spectrum.absorbance[j])});
  sp.write(dir / "spectrum.csv");
  write_trajectory(r.trajectory, dir);
  write_bins(r.bins, dir);
  CsvTable pk({"rabi_splitting_au", "lower_peak_au", "upper_peak_au", "side_peak"});
  if (r.rabi)
    pk.add({csv_number(r.rabi->splitting), csv_number(r.spectrum.omega[r.rabi->lower]),
            csv_number(r.spectrum.omega[r.rabi->upper]), csv_number(r.rabi->side_peak)});
  pk.write(dir / "peaks.csv");
  write_manifest(with_bins(config, r.bins), "spectrum");
}

void write_dynamics_files(const RunConfig& config, const DynamicsResult& r) {
  const fs::path dir(config.output_dir);
  const std::size_t nb = r.bins.size();
  std::vector<std::string> header{"t_au", "P_e1", "P_e2", "photon", "gamma", "P_e1_norm", "P_e2_norm"};
  for (std::size_t i = 0; i < nb; ++i) header.push_back("P_e1_bin" + bin_tag(i));
  for (std::size_t i = 0; i < nb; ++i) header.push_back("P_e2_bin" + bin_tag(i));
  CsvTable pops(header);
  for (const PopulationRow& row : r.populations.rows) {
    std::vector<std::string> cells{csv_number(row.time),          csv_number(row.e1_total),
                                   csv_number(row.e2_total),      csv_number(row.photon),
                                   csv_number(row.leakage()),     csv_number(row.e1_normalized()),
                                   csv_number(row.e2_normalized())};
    for (double p : row.e1) cells.push_back(csv_number(p));
    for (double p : row.e2) cells.push_back(csv_number(p));
    pops.add(std::move(cells));
  }
  pops.write(dir / "populations.csv");

  CsvTable vib({"t_au", "bin", "omega0_au", "P_e1", "E_vib_au", "status"});
  for (const VibEnergyRow& v : r.vib_energy)
    vib.add({csv_number(v.time), std::to_string(v.bin), csv_number(r.bins[v.bin].omega0), csv_number(v.population),
             v.energy ? csv_number(*v.energy) : std::string(), v.energy ? "ok" : "zero_population"});
  vib.write(dir / "vib_energy.csv");

  CsvTable yield({"bin", "omega0_au", "P_e1", "P_e2", "P_e2_norm", "reactivity"});
  const PopulationRow& last = r.populations.rows.back();
  for (std::size_t i = 0; i < nb; ++i) {
    const double excited = last.e1[i] + last.e2[i];
    yield.add({std::to_string(i), csv_number(r.bins[i].omega0), csv_number(last.e1[i]), csv_number(last.e2[i]),
               csv_number(r.yield.per_bin_normalized[i]), excited > 0.0 ? csv_number(last.e2[i] / excited) : ""});
  }
  yield.write(dir / "yield.csv");
  write_bins(r.bins, dir);
  write_manifest(with_bins(config, r.bins), "dynamics");
}

// Runs `one` on every sweep point in point_XXX/ and writes points.csv.
template <class F>
std::size_t run_points(const RunConfig& config, const RunOptions& options, F&& one) {
  const std::vector<SweepPoint> points = expand_sweep(config);
  const fs::path base(config.output_dir);
  std::vector<std::string> status(points.size(), "ok");
  parallel_for(points.size(), options.threads, [&](std::size_t k) {
    RunConfig c = points[k].config;
    c.output_dir = (base / ("point_" + bin_tag(k))).string();
    try {
      one(c);
    } catch (const ConfigError&) {
      throw;
    } catch (const OutputError&) {
      throw;
    } catch (const std::exception& e) {
      status[k] = clean_message(e.what());
    }
    log_line(options, "point " + bin_tag(k) + ": " + status[k]);
  });

  std::vector<std::string> header{"point"};
  for (const auto& [name, value] : points.front().labels) header.push_back(name);
  header.push_back("status");
  CsvTable index(header);
  std::size_t failed = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::vector<std::string> row{"point_" + bin_tag(k)};
    for (const auto& [name, value] : points[k].labels) row.push_back(value);
    row.push_back(status[k]);
    index.add(std::move(row));
    failed += status[k] != "ok";
  }
  index.write(base / "points.csv");
  write_manifest(config, "sweep-points");
  return failed;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

SpectrumResult compute_spectrum(const RunConfig& config) {
  if (config.initial.kind != InitialKind::Photonic)
    throw ConfigError("spectrum runs need initial_state = photonic");
  Setup s = resolve(config);
  SpectrumResult r;
  r.trajectory = propagate(s.h, make_initial_state(s.config.initial, s.h), propagation_options(s.config));
  r.spectrum = absorption(r.trajectory, s.config.model.kappa, default_omega_grid(s.config.model));
  try {
    r.rabi = rabi_splitting(r.spectrum);
  } catch (const std::domain_error&) {
    r.rabi.reset();
  }
  r.bins = std::move(s.bins);
  return r;
}

DynamicsResult compute_dynamics(const RunConfig& config) {
  Setup s = resolve(config);
  const RunConfig& c = s.config;
  // Snapshots land on the nearest record time.
  const std::size_t n_records = record_count(c.dt_record, c.t_final);
  std::set<std::size_t> snapshot_at;
  for (double t : c.snapshot_times) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n_records; ++k)
      if (std::abs(record_time(k, c.dt_record, c.t_final) - t) < std::abs(record_time(best, c.dt_record, c.t_final) - t))
        best = k;
    snapshot_at.insert(best);
  }

  DynamicsResult r;
  PopulationAccumulator acc(s.h);
  StateObserver pops = acc.observer();
  PropagationOptions o = propagation_options(c);
  o.observer = [&](std::size_t k, double t, const StateVector& psi) {
    pops(k, t, psi);
    if (!snapshot_at.contains(k)) return;
    const PopulationRow row = population_row(psi, s.h, t);
    for (std::size_t i = 0; i < s.h.n_bins; ++i) {
      VibEnergyRow v{t, i, row.e1[i], std::nullopt};
      if (row.e1[i] > 0.0) v.energy = vibrational_energy_per_bin(psi, s.h, c.model, i);
      r.vib_energy.push_back(v);
    }
  };
  propagate(s.h, make_initial_state(c.initial, s.h), o);
  r.populations = acc.take();
  r.yield = reaction_yield(r.populations);
  r.bins = std::move(s.bins);
  return r;
}

std::vector<SweepRow> compute_sweep(const RunConfig& config, const RunOptions& options) {
  const std::vector<SweepPoint> points = expand_sweep(config);
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), options.threads, [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.labels = points[k].labels;
    row.config = points[k].config;
    row.n_bins = row.config.resolved_bins();
    try {
      const DynamicsResult d = compute_dynamics(row.config);
      row.p_e2 = d.yield.total;
      row.p_e2_normalized = d.yield.total_normalized;
      row.gamma = d.yield.leakage;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      row.status = clean_message(e.what());
    }
    log_line(options, "sweep point " + std::to_string(k) + ": " + row.status);
  });
  auto key = [](const SweepRow& r) {
    const ModelSpec& m = r.config.model;
    return std::make_tuple(m.sigma, m.coupling, m.kappa, m.delta2, initial_kind_name(r.config.initial.kind));
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const SweepRow& a, const SweepRow& b) { return key(a) < key(b); });
  return rows;
}

ConvergeReport compute_converge(const RunConfig& config, const RunOptions& options) {
  if (!(config.model.sigma > 0.0)) throw ConfigError("converge needs sigma > 0");
  ConvergeReport rep;
  rep.rule = config.resolved_bins();
  std::vector<std::size_t> counts;
  for (std::size_t n : {rep.rule / 4, rep.rule / 2, rep.rule, 2 * rep.rule}) {
    n = std::max<std::size_t>(1, n);
    if (std::find(counts.begin(), counts.end(), n) == counts.end()) counts.push_back(n);
  }

  struct LevelData {
    std::vector<double> absorbance, gamma, ratio, e1;
    double ratio_final{0.0};
  };
  const bool photonic = config.initial.kind == InitialKind::Photonic;
  std::vector<LevelData> data(counts.size());
  parallel_for(counts.size(), options.threads, [&](std::size_t l) {
    RunConfig c = config;
    c.n_bins = counts[l];
    Setup s = resolve(c);
    PopulationAccumulator acc(s.h);
    PropagationOptions o = propagation_options(s.config);
    o.observer = acc.observer();
    const Trajectory traj = propagate(s.h, make_initial_state(s.config.initial, s.h), o);
    LevelData& d = data[l];
    if (photonic) d.absorbance = absorption(traj, c.model.kappa, default_omega_grid(c.model)).absorbance;
    for (const PopulationRow& row : acc.record().rows) {
      d.gamma.push_back(row.leakage());
      d.e1.push_back(row.e1_total);
      d.ratio.push_back(row.e1_total > 0.0 ? row.e2_total / row.e1_total : 0.0);
    }
    const PopulationRow& last = acc.record().rows.back();
    if (!(last.e1_total > 0.0)) throw std::domain_error("converge: P_e1(T_f) vanishes, ratio undefined");
    d.ratio_final = last.e2_total / last.e1_total;
    log_line(options, "converge n_bins=" + std::to_string(counts[l]) + " done");
  });

  const std::size_t rule_level =
      static_cast<std::size_t>(std::find(counts.begin(), counts.end(), std::max<std::size_t>(1, rep.rule)) - counts.begin());
  for (std::size_t l = 0; l < counts.size(); ++l) {
    ConvergeLevel lv;
    lv.n_bins = counts[l];
    lv.ratio_final = data[l].ratio_final;
    lv.ratio_change = std::abs(data[l].ratio_final - data[rule_level].ratio_final) / std::abs(data[rule_level].ratio_final);
    if (l > 0) {
      lv.max_dev_absorption = max_abs_diff(data[l].absorbance, data[l - 1].absorbance);
      lv.max_dev_gamma = max_abs_diff(data[l].gamma, data[l - 1].gamma);
      // The ratio is ill-conditioned while P_e1 is still tiny.
      for (std::size_t k = 0; k < data[l].ratio.size(); ++k)
        if (data[l].e1[k] >= 1e-6 && data[l - 1].e1[k] >= 1e-6)
          lv.max_dev_ratio = std::max(lv.max_dev_ratio, std::abs(data[l].ratio[k] - data[l - 1].ratio[k]));
    }
    rep.levels.push_back(lv);
  }
  return rep;
}

OracleReport compute_oracle(const RunConfig& config, const RunOptions& options) {
  const BinSet bins = discretize_disorder(config.model, config.resolved_bins());
  const PropagationOptions o = propagation_options(config);
  OracleReport rep;
  const auto& molecules = config.oracle.molecules;
  if (molecules.empty()) throw ConfigError("oracle needs at least one molecule count");
  rep.explicit_rows.resize(molecules.size());
  const bool with_multibin = bins.size() <= 2;
  parallel_for(molecules.size() + (with_multibin ? 1 : 0), options.threads, [&](std::size_t k) {
    if (k == molecules.size()) {
      rep.multibin = compare_multibin_to_cute(config.model, bins, config.oracle.n_vib, config.initial, o);
      log_line(options, "oracle multibin done");
      return;
    }
    const ExplicitEnsemble e = make_ensemble(config.model, bins, molecules[k], config.oracle.n_vib);
    OracleRow& row = rep.explicit_rows[k];
    row.molecules = molecules[k];
    row.dimension = build_explicit_hamiltonian(e).dimension();
    row.deviation = compare_to_cute(e, config.initial, o);
    log_line(options, "oracle N=" + std::to_string(molecules[k]) + " done");
  });
  return rep;
}

std::size_t run_spectrum(const RunConfig& config, const RunOptions& options) {
  if (!config.sweep.empty())
    return run_points(config, options, [](const RunConfig& c) { write_spectrum_files(c, compute_spectrum(c)); });
  write_spectrum_files(config, compute_spectrum(config));
  return 0;
}

std::size_t run_dynamics(const RunConfig& config, const RunOptions& options) {
  if (!config.sweep.empty())
    return run_points(config, options, [](const RunConfig& c) { write_dynamics_files(c, compute_dynamics(c)); });
  write_dynamics_files(config, compute_dynamics(config));
  return 0;
}

std::size_t run_sweep(const RunConfig& config, const RunOptions& options) {
  const std::vector<SweepRow> rows = compute_sweep(config, options);
  CsvTable t({"sigma", "coupling", "kappa", "delta2", "initial_state", "n_bins", "P_e2", "P_e2_norm", "gamma", "status"});
  std::size_t failed = 0;
  for (const SweepRow& r : rows) {
    const ModelSpec& m = r.config.model;
    const bool ok = r.status == "ok";
    failed += !ok;
    t.add({csv_number(m.sigma), csv_number(m.coupling), csv_number(m.kappa), csv_number(m.delta2),
           initial_kind_name(r.config.initial.kind), std::to_string(r.n_bins), ok ? csv_number(r.p_e2) : "",
           ok ? csv_number(r.p_e2_normalized) : "", ok ? csv_number(r.gamma) : "", r.status});
  }
  t.write(fs::path(config.output_dir) / "sweep.csv");
  write_manifest(config, "sweep");
  return failed;
}

std::size_t run_converge(const RunConfig& config, const RunOptions& options) {
  if (!config.sweep.empty()) throw ConfigError("converge does not take a [sweep] section");
  const ConvergeReport rep = compute_converge(config, options);
  CsvTable t({"n_bins", "ratio_final", "ratio_change_vs_rule", "max_dev_A_prev", "max_dev_gamma_prev",
              "max_dev_ratio_prev"});
  for (const ConvergeLevel& l : rep.levels)
    t.add({std::to_string(l.n_bins), csv_number(l.ratio_final), csv_number(l.ratio_change),
           csv_number(l.max_dev_absorption), csv_number(l.max_dev_gamma), csv_number(l.max_dev_ratio)});
  t.write(fs::path(config.output_dir) / "converge.csv");
  RunConfig resolved = config;
  resolved.n_bins = rep.rule;
  write_manifest(resolved, "converge");
  return 0;
}

std::size_t run_oracle(const RunConfig& config, const RunOptions& options) {
  if (!config.sweep.empty()) throw ConfigError("oracle does not take a [sweep] section");
  const OracleReport rep = compute_oracle(config, options);
  const std::vector<std::string> dev_cols{"photon_max", "photon_final",     "e1_bin_max",   "e1_bin_final",
                                          "e2_bin_max", "e2_bin_final",     "e1_total_max", "e1_total_final",
                                          "e2_total_max", "e2_total_final", "C_max",        "C_final"};
  auto cells = [](const DeviationReport& d) {
    std::vector<std::string> out;
    for (const Deviation* x : {&d.photon, &d.e1_bin, &d.e2_bin, &d.e1_total, &d.e2_total, &d.autocorrelation}) {
      out.push_back(csv_number(x->max));
      out.push_back(csv_number(x->final));
    }
    return out;
  };
  std::vector<std::string> header{"molecules", "dimension"};
  header.insert(header.end(), dev_cols.begin(), dev_cols.end());
  CsvTable t(header);
  for (const OracleRow& r : rep.explicit_rows) {
    std::vector<std::string> row{std::to_string(r.molecules), std::to_string(r.dimension)};
    const auto dev = cells(r.deviation);
    row.insert(row.end(), dev.begin(), dev.end());
    t.add(std::move(row));
  }
  t.write(fs::path(config.output_dir) / "oracle.csv");
  if (rep.multibin) {
    CsvTable m(dev_cols);
    m.add(cells(*rep.multibin));
    m.write(fs::path(config.output_dir) / "multibin.csv");
  }
  RunConfig resolved = config;
  resolved.n_bins = config.resolved_bins();
  write_manifest(resolved, "oracle");
  return 0;
}

int execute(const std::string& command, const RunConfig& config, const RunOptions& options, std::ostream& err) {
  try {
    std::size_t failed = 0;
    if (command == "spectrum") failed = run_spectrum(config, options);
    else if (command == "dynamics") failed = run_dynamics(config, options);
    else if (command == "sweep") failed = run_sweep(config, options);
    else if (command == "converge") failed = run_converge(config, options);
    else if (command == "oracle") failed = run_oracle(config, options);
    else throw ConfigError("unknown command '" + command + "'");
    if (failed) {
      err << "error: " << failed << " grid point(s) failed, see status column\n";
      return 2;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::length_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const PropagationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace polariton::cli
