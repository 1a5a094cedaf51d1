// config.cpp

#include "polariton/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace polariton::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"omega0", "omega_nu", "s1", "s2", "v12", "delta2", "omega_c", "kappa", "coupling", "sigma"}},
      {"run",
       {"n_bins", "n_vib", "t_final", "dt_record", "tolerance", "initial_state", "custom_amplitudes",
        "snapshot_times", "output_dir", "preset", "max_dimension"}},
      {"sweep", {"sigma", "coupling", "kappa", "delta2", "initial_state"}},
      {"oracle", {"molecules", "n_vib"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void check_key(const std::string& section, const std::string& key, std::string_view origin) {
  const auto it = schema().find(section);
  if (it == schema().end()) throw ConfigError(std::string(origin) + ": unknown section [" + section + "]");
  if (!it->second.contains(key))
    throw ConfigError(std::string(origin) + ": unknown key '" + key + "' in [" + section + "]");
}

double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ConfigError("invalid number for '" + key + "': '" + text + "'");
  return v;
}

std::size_t parse_count(const std::string& text, const std::string& key) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
  return v;
}

// "<number> [fs|au]"
double parse_time(const std::string& text, const std::string& key) {
  std::string number = text;
  std::string unit = "au";
  for (const char* suffix : {"fs", "au"}) {
    if (text.size() > 2 && text.ends_with(suffix)) {
      number = trim(std::string_view(text).substr(0, text.size() - 2));
      unit = suffix;
      break;
    }
  }
  const double v = parse_double(number, key);
  try {
    return time_convert(v, unit);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid time for '" + key + "': " + e.what());
  }
}

InitialKind parse_initial(const std::string& text) {
  if (text == "photonic") return InitialKind::Photonic;
  if (text == "bright") return InitialKind::Bright;
  if (text == "upper") return InitialKind::UpperPolariton;
  if (text == "lower") return InitialKind::LowerPolariton;
  if (text == "custom") return InitialKind::Custom;
  throw ConfigError("unknown initial_state '" + text + "'");
}

template <class F>
auto parse_list(const std::string& text, F&& parse_one) {
  std::vector<decltype(parse_one(std::string{}))> out;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) throw ConfigError("empty list entry in '" + text + "'");
    out.push_back(parse_one(item));
  }
  return out;
}

std::string fmt(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

void RawConfig::merge_text(std::string_view text, std::string_view origin) {
  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    const std::size_t hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!schema().contains(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    check_key(section, key, where);
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    entries_[full] = value;
  }
}

void RawConfig::apply_override(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' lacks '='");
  std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  std::string section;
  if (const std::size_t dot = key.find('.'); dot != std::string::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
  } else {
    for (const char* candidate : {"model", "run", "oracle"})
      if (schema().at(candidate).contains(key)) {
        section = candidate;
        break;
      }
    if (section.empty()) throw ConfigError("override: unknown key '" + key + "'");
  }
  check_key(section, key, "override");
  entries_[section + "." + key] = value;
}

std::size_t RunConfig::resolved_bins() const {
  return n_bins ? *n_bins : bin_count_rule(model.sigma, t_final > 0.0 ? t_final : dt_record);
}

RunConfig parse_config(const RawConfig& raw) {
  RunConfig c;
  std::string custom_text;
  for (const auto& [full, value] : raw.entries()) {
    const std::size_t dot = full.find('.');
    const std::string section = full.substr(0, dot);
    const std::string key = full.substr(dot + 1);
    if (section == "model") {
      ModelSpec& m = c.model;
      double* target = key == "omega0"     ? &m.omega0
                       : key == "omega_nu" ? &m.omega_nu
                       : key == "s1"       ? &m.s1
                       : key == "s2"       ? &m.s2
                       : key == "v12"      ? &m.v12
                       : key == "delta2"   ? &m.delta2
                       : key == "omega_c"  ? &m.omega_c
                       : key == "kappa"    ? &m.kappa
                       : key == "coupling" ? &m.coupling
                                           : &m.sigma;
      *target = parse_double(value, key);
    } else if (section == "run") {
      if (key == "n_bins") {
        if (value == "auto") c.n_bins.reset();
        else c.n_bins = parse_count(value, key);
      } else if (key == "n_vib") c.n_vib = parse_count(value, key);
      else if (key == "t_final") c.t_final = parse_time(value, key);
      else if (key == "dt_record") c.dt_record = parse_time(value, key);
      else if (key == "tolerance") c.tolerance = parse_double(value, key);
      else if (key == "initial_state") c.initial.kind = parse_initial(value);
      else if (key == "custom_amplitudes") custom_text = value;
      else if (key == "snapshot_times")
        c.snapshot_times = value.empty() ? std::vector<double>{}
                                         : parse_list(value, [&](const std::string& s) { return parse_time(s, key); });
      else if (key == "output_dir") c.output_dir = value;
      else if (key == "preset") c.preset = value;
      else if (key == "max_dimension") c.max_dimension = parse_count(value, key);
    } else if (section == "sweep") {
      auto numbers = [&](const std::string& s) { return parse_double(s, key); };
      if (key == "sigma") c.sweep.sigma = parse_list(value, numbers);
      else if (key == "coupling") c.sweep.coupling = parse_list(value, numbers);
      else if (key == "kappa") c.sweep.kappa = parse_list(value, numbers);
      else if (key == "delta2") c.sweep.delta2 = parse_list(value, numbers);
      else if (key == "initial_state") c.sweep.initial_state = parse_list(value, parse_initial);
    } else if (section == "oracle") {
      if (key == "molecules")
        c.oracle.molecules = parse_list(value, [&](const std::string& s) { return parse_count(s, key); });
      else if (key == "n_vib") c.oracle.n_vib = parse_count(value, key);
    }
  }

  if (c.initial.kind == InitialKind::Custom || !custom_text.empty()) {
    if (c.initial.kind != InitialKind::Custom) throw ConfigError("custom_amplitudes given without initial_state = custom");
    if (custom_text.empty()) throw ConfigError("initial_state = custom needs custom_amplitudes");
    auto amplitudes = parse_list(custom_text, [](const std::string& s) {
      const auto parts = split(s, ' ');
      std::vector<std::string> tokens;
      for (const auto& p : parts)
        if (!p.empty()) tokens.push_back(p);
      if (tokens.empty() || tokens.size() > 2) throw ConfigError("custom amplitude must be 're [im]': '" + s + "'");
      return cplx{parse_double(tokens[0], "custom_amplitudes"),
                  tokens.size() == 2 ? parse_double(tokens[1], "custom_amplitudes") : 0.0};
    });
    c.initial.custom_photon = amplitudes.front();
    c.initial.custom_bins.assign(amplitudes.begin() + 1, amplitudes.end());
  }

  try {
    c.model.validate();
    record_count(c.dt_record, c.t_final);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.n_bins && *c.n_bins == 0) throw ConfigError("n_bins must be >= 1");
  if (c.sweep.sigma.empty() && c.model.sigma == 0.0 && c.n_bins && *c.n_bins > 1)
    throw ConfigError("sigma = 0 admits a single bin only");
  if (c.n_vib < 2) throw ConfigError("n_vib must be >= 2");
  if (!(c.tolerance >= 1e-12 && c.tolerance <= 1e-6)) throw ConfigError("tolerance must lie in [1e-12, 1e-6]");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  for (double t : c.snapshot_times)
    if (t > c.t_final) throw ConfigError("snapshot time beyond t_final");
  return c;
}

std::string initial_kind_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::Photonic: return "photonic";
    case InitialKind::Bright: return "bright";
    case InitialKind::UpperPolariton: return "upper";
    case InitialKind::LowerPolariton: return "lower";
    case InitialKind::Custom: return "custom";
  }
  return "photonic";
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  const ModelSpec& m = c.model;
  out << "[model]\n"
      << "omega0 = " << fmt(m.omega0) << "\n"
      << "omega_nu = " << fmt(m.omega_nu) << "\n"
      << "s1 = " << fmt(m.s1) << "\n"
      << "s2 = " << fmt(m.s2) << "\n"
      << "v12 = " << fmt(m.v12) << "\n"
      << "delta2 = " << fmt(m.delta2) << "\n"
      << "omega_c = " << fmt(m.omega_c) << "\n"
      << "kappa = " << fmt(m.kappa) << "\n"
      << "coupling = " << fmt(m.coupling) << "\n"
      << "sigma = " << fmt(m.sigma) << "\n\n";
  out << "[run]\n"
      << "n_bins = " << (c.n_bins ? std::to_string(*c.n_bins) : std::string("auto")) << "\n"
      << "n_vib = " << c.n_vib << "\n"
      << "t_final = " << fmt(c.t_final) << " au\n"
      << "dt_record = " << fmt(c.dt_record) << " au\n"
      << "tolerance = " << fmt(c.tolerance) << "\n"
      << "initial_state = " << initial_kind_name(c.initial.kind) << "\n";
  if (c.initial.kind == InitialKind::Custom) {
    out << "custom_amplitudes = " << fmt(c.initial.custom_photon.real()) << " " << fmt(c.initial.custom_photon.imag());
    for (const cplx& a : c.initial.custom_bins) out << ", " << fmt(a.real()) << " " << fmt(a.imag());
    out << "\n";
  }
  if (!c.snapshot_times.empty()) {
    out << "snapshot_times = ";
    for (std::size_t k = 0; k < c.snapshot_times.size(); ++k)
      out << (k ? ", " : "") << fmt(c.snapshot_times[k]) << " au";
    out << "\n";
  }
  out << "output_dir = " << c.output_dir << "\n";
  if (!c.preset.empty()) out << "preset = " << c.preset << "\n";
  out << "max_dimension = " << c.max_dimension << "\n";

  auto list = [&](const char* key, const std::vector<double>& v) {
    if (v.empty()) return;
    out << key << " = ";
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? ", " : "") << fmt(v[k]);
    out << "\n";
  };
  if (!c.sweep.empty()) {
    out << "\n[sweep]\n";
    list("sigma", c.sweep.sigma);
    list("coupling", c.sweep.coupling);
    list("kappa", c.sweep.kappa);
    list("delta2", c.sweep.delta2);
    if (!c.sweep.initial_state.empty()) {
      out << "initial_state = ";
      for (std::size_t k = 0; k < c.sweep.initial_state.size(); ++k)
        out << (k ? ", " : "") << initial_kind_name(c.sweep.initial_state[k]);
      out << "\n";
    }
  }
  out << "\n[oracle]\nmolecules = ";
  for (std::size_t k = 0; k < c.oracle.molecules.size(); ++k) out << (k ? ", " : "") << c.oracle.molecules[k];
  out << "\nn_vib = " << c.oracle.n_vib << "\n";
  return out.str();
}

std::vector<SweepPoint> expand_sweep(const RunConfig& base) {
  RunConfig plain = base;
  plain.sweep = {};
  std::vector<SweepPoint> points{{plain, {}}};
  auto axis = [&](const char* name, const std::vector<double>& values, double ModelSpec::*field) {
    if (values.empty()) return;
    std::vector<SweepPoint> next;
    for (const SweepPoint& p : points)
      for (double v : values) {
        SweepPoint q = p;
        q.config.model.*field = v;
        q.labels.emplace_back(name, fmt(v));
        next.push_back(std::move(q));
      }
    points = std::move(next);
  };
  axis("sigma", base.sweep.sigma, &ModelSpec::sigma);
  axis("coupling", base.sweep.coupling, &ModelSpec::coupling);
  axis("kappa", base.sweep.kappa, &ModelSpec::kappa);
  axis("delta2", base.sweep.delta2, &ModelSpec::delta2);
  if (!base.sweep.initial_state.empty()) {
    std::vector<SweepPoint> next;
    for (const SweepPoint& p : points)
      for (InitialKind k : base.sweep.initial_state) {
        SweepPoint q = p;
        q.config.initial.kind = k;
        q.labels.emplace_back("initial_state", initial_kind_name(k));
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  for (const SweepPoint& p : points) {
    try {
      p.config.model.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("sweep point: ") + e.what());
    }
    if (p.config.model.sigma == 0.0 && p.config.n_bins && *p.config.n_bins > 1)
      throw ConfigError("sweep point: sigma = 0 admits a single bin only");
  }
  return points;
}

std::optional<std::string> find_preset(std::string_view name) {
  for (const auto& [key, text] : preset_table())
    if (key == name) return text;
  return std::nullopt;
}

}  // namespace polariton::cli
