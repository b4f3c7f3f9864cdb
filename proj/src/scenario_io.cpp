#include "eitmem/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace eitmem {

namespace {

// ---------------------------------------------------------------------------
// Number formatting: 17 significant digits round-trips every double.

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Key schema

enum class Dim { Rate, Frequency, Length, Time, Speed, Angle, Plain, Count, Bool, Text };

// Decimal prefixes shift the exponent so that "30 us" parses to exactly 30e-6.
struct Unit {
  int exp10 = 0;
  double factor = 1.0;
};

using UnitTable = std::map<std::string, Unit, std::less<>>;

const UnitTable& units_for(Dim dim) {
  static const UnitTable rate{{"rad/s", {}}, {"1/s", {}}, {"s^-1", {}}};
  static const UnitTable freq{{"1/s", {}}, {"s^-1", {}}};
  static const UnitTable length{{"m", {}},        {"cm", {-2, 1.0}},          {"mm", {-3, 1.0}},
                                {"um", {-6, 1.0}}, {"\xC2\xB5m", {-6, 1.0}}, {"\xCE\xBCm", {-6, 1.0}},
                                {"nm", {-9, 1.0}}};
  static const UnitTable time{{"s", {}},         {"ms", {-3, 1.0}},          {"us", {-6, 1.0}},
                              {"\xC2\xB5s", {-6, 1.0}}, {"\xCE\xBCs", {-6, 1.0}},
                              {"ns", {-9, 1.0}}};
  static const UnitTable speed{{"m/s", {}}};
  static const UnitTable angle{{"rad", {}}, {"deg", {0, std::numbers::pi / 180.0}}};
  static const UnitTable none{};
  switch (dim) {
    case Dim::Rate: return rate;
    case Dim::Frequency: return freq;
    case Dim::Length: return length;
    case Dim::Time: return time;
    case Dim::Speed: return speed;
    case Dim::Angle: return angle;
    default: return none;
  }
}

const char* canonical_unit(Dim dim) {
  switch (dim) {
    case Dim::Rate: return "rad/s";
    case Dim::Frequency: return "1/s";
    case Dim::Length: return "m";
    case Dim::Time: return "s";
    case Dim::Speed: return "m/s";
    case Dim::Angle: return "rad";
    default: return "";
  }
}

struct KeySpec {
  const char* name;
  Dim dim;
  std::function<double&(RunConfig&)> real;  // numeric keys
};

const std::vector<KeySpec>& numeric_keys() {
  static const std::vector<KeySpec> keys{
      {"g", Dim::Rate, [](RunConfig& c) -> double& { return c.params.g; }},
      {"n_atoms", Dim::Plain, [](RunConfig& c) -> double& { return c.params.n_atoms; }},
      {"gamma_ba", Dim::Rate, [](RunConfig& c) -> double& { return c.params.gamma_ba; }},
      {"gamma_bc", Dim::Rate, [](RunConfig& c) -> double& { return c.params.gamma_bc; }},
      {"delta", Dim::Rate, [](RunConfig& c) -> double& { return c.params.delta; }},
      {"delta_p", Dim::Rate, [](RunConfig& c) -> double& { return c.params.delta_p; }},
      {"c_light", Dim::Speed, [](RunConfig& c) -> double& { return c.params.c_light; }},
      {"cell_length", Dim::Length, [](RunConfig& c) -> double& { return c.params.cell_length; }},
      {"u_scale", Dim::Plain, [](RunConfig& c) -> double& { return c.u_scale; }},
      {"switch_rate", Dim::Frequency, [](RunConfig& c) -> double& { return c.switch_rate; }},
      {"t_off", Dim::Time, [](RunConfig& c) -> double& { return c.t_off; }},
      {"t_on", Dim::Time, [](RunConfig& c) -> double& { return c.t_on; }},
      {"omega_floor", Dim::Rate, [](RunConfig& c) -> double& { return c.omega_floor; }},
      {"theta", Dim::Angle, [](RunConfig& c) -> double& { return c.theta; }},
      {"pulse_amplitude", Dim::Plain, [](RunConfig& c) -> double& { return c.pulse.amplitude; }},
      {"pulse_center", Dim::Length, [](RunConfig& c) -> double& { return c.pulse.center; }},
      {"pulse_width", Dim::Length, [](RunConfig& c) -> double& { return c.pulse.width; }},
      {"z_min", Dim::Length, [](RunConfig& c) -> double& { return c.z_min; }},
      {"z_max", Dim::Length, [](RunConfig& c) -> double& { return c.z_max; }},
      {"t_end", Dim::Time, [](RunConfig& c) -> double& { return c.t_end; }},
      {"dt", Dim::Time, [](RunConfig& c) -> double& { return c.dt; }},
      {"snapshot_every", Dim::Time, [](RunConfig& c) -> double& { return c.snapshot_every; }},
  };
  return keys;
}

// ---------------------------------------------------------------------------
// Line parsing

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Assignment {
  int line = 0;
  int key_col = 0;
  int value_col = 0;
  std::string key;
  std::string value;  // whole right-hand side, trimmed
};

int column_of(std::string_view line, std::string_view part) {
  return static_cast<int>(part.data() - line.data()) + 1;
}

std::vector<Assignment> tokenize(std::string_view text) {
  std::vector<Assignment> out;
  std::set<std::string, std::less<>> seen;
  bool active = true;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view body = line.substr(0, std::min(line.find('#'), line.size()));
    body = trim(body);
    if (body.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ParseError(line_no, column_of(line, body), "unterminated section header");
      }
      active = trim(body.substr(1, body.size() - 2)) == "config";
      continue;
    }
    if (!active) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, column_of(line, body), "expected 'key = value'");
    }
    const std::string_view key = trim(body.substr(0, eq));
    const std::string_view value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, column_of(line, body), "missing key");
    for (char ch : key) {
      if (!(std::islower(static_cast<unsigned char>(ch)) ||
            std::isdigit(static_cast<unsigned char>(ch)) || ch == '_')) {
        throw ParseError(line_no, column_of(line, key), "invalid key '" + std::string(key) + "'");
      }
    }
    if (value.empty()) {
      throw ParseError(line_no, column_of(line, body) + static_cast<int>(eq) + 1, "missing value");
    }
    if (!seen.insert(std::string(key)).second) {
      throw ParseError(line_no, column_of(line, key), "duplicate key '" + std::string(key) + "'");
    }
    out.push_back({line_no, column_of(line, key), column_of(line, value), std::string(key),
                   std::string(value)});
    if (end == text.size()) break;
  }
  if (out.empty()) throw ParseError(1, 1, "empty configuration");
  return out;
}

double parse_number(const Assignment& a, std::string_view token, int exp10 = 0) {
  std::string text(token);
  if (!text.empty() && text.front() == '+') text.erase(0, 1);
  if (exp10 != 0) {
    // Fold the prefix into the exponent and let from_chars round once.
    const auto e = text.find_first_of("eE");
    int exponent = 0;
    if (e != std::string::npos) {
      const auto res = std::from_chars(text.data() + e + 1 + (text[e + 1] == '+'),
                                       text.data() + text.size(), exponent);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError(a.line, a.value_col, "'" + std::string(token) + "' is not a number");
      }
      text.erase(e);
    }
    text += "e" + std::to_string(exponent + exp10);
  }
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError(a.line, a.value_col, "'" + std::string(token) + "' is not a number");
  }
  return x;
}

void apply_numeric(RunConfig& c, const KeySpec& spec, const Assignment& a) {
  std::string_view v = a.value;
  const auto space = v.find_first_of(" \t");
  const std::string_view token = v.substr(0, std::min(space, v.size()));
  const std::string_view unit = space == std::string_view::npos ? "" : trim(v.substr(space));
  Unit u;
  if (!unit.empty()) {
    const auto& table = units_for(spec.dim);
    const auto it = table.find(unit);
    if (it == table.end()) {
      throw ParseError(a.line, a.value_col + static_cast<int>(unit.data() - v.data()),
                       "unit '" + std::string(unit) + "' not valid for '" + a.key + "'");
    }
    u = it->second;
  }
  double x = parse_number(a, token, u.exp10);
  if (u.factor != 1.0) x *= u.factor;
  spec.real(c) = x;
}

bool parse_bool(const Assignment& a) {
  static const std::map<std::string, bool, std::less<>> words{
      {"true", true}, {"false", false}, {"yes", true}, {"no", false},
      {"on", true},   {"off", false},   {"1", true},   {"0", false}};
  const auto it = words.find(a.value);
  if (it == words.end()) throw ParseError(a.line, a.value_col, "expected true or false");
  return it->second;
}

void apply(RunConfig& c, const Assignment& a) {
  for (const auto& spec : numeric_keys()) {
    if (a.key == spec.name) {
      apply_numeric(c, spec, a);
      return;
    }
  }
  if (a.key == "name") {
    c.name = a.value;
  } else if (a.key == "out_dir") {
    c.out_dir = a.value;
  } else if (a.key == "profile") {
    if (a.value == "tanh") c.profile = ProfileChoice::Tanh;
    else if (a.value == "constant") c.profile = ProfileChoice::Constant;
    else throw ParseError(a.line, a.value_col, "profile must be 'tanh' or 'constant'");
  } else if (a.key == "grid_points") {
    std::size_t n = 0;
    const auto res = std::from_chars(a.value.data(), a.value.data() + a.value.size(), n);
    if (res.ec != std::errc() || res.ptr != a.value.data() + a.value.size()) {
      throw ParseError(a.line, a.value_col, "grid_points must be a positive integer");
    }
    c.grid_points = n;
  } else if (a.key == "emit_analytic_reference") {
    c.emit_analytic_reference = parse_bool(a);
  } else if (a.key == "spectral_filter") {
    c.spectral_filter = parse_bool(a);
  } else if (a.key != "preset") {
    throw ParseError(a.line, a.key_col, "unknown key '" + a.key + "'");
  }
}

// ---------------------------------------------------------------------------
// Output helpers

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem, i, ext);
  return buf;
}

const char* verdict(double distortion) {
  if (!std::isfinite(distortion) || distortion > kDestroyedThreshold) return "destroyed";
  if (distortion < kUndistortedThreshold) return "preserved";
  return "distorted";
}

}  // namespace

// ---------------------------------------------------------------------------

Scenario to_scenario(const RunConfig& c) {
  c.params.validate();
  Scenario s;
  s.params = c.params;
  s.profile = c.profile == ProfileChoice::Tanh
                  ? ControlProfile::tanh_switch(c.u_scale, c.switch_rate, c.t_off, c.t_on,
                                                c.omega_floor)
                  : ControlProfile::constant_theta(c.theta, c.omega_floor);
  if (!(c.pulse.width > 0.0) || !std::isfinite(c.pulse.width)) {
    throw ValidationError("pulse_width > 0");
  }
  if (!(c.pulse.amplitude > 0.0) || !std::isfinite(c.pulse.amplitude)) {
    throw ValidationError("pulse_amplitude > 0");
  }
  s.grid = SpatialGrid(c.z_min, c.z_max, c.grid_points);
  s.input_pulse = gaussian_pulse(s.grid, c.pulse);
  s.t_end = c.t_end;
  s.dt = c.dt;
  s.snapshot_every = c.snapshot_every;
  s.spectral_filter = c.spectral_filter;
  s.validate();
  return s;
}

RunConfig load_config_text(std::string_view text) {
  const auto assignments = tokenize(text);
  RunConfig c;
  for (const auto& a : assignments) {
    if (a.key != "preset") continue;
    try {
      c = find_preset(a.value).config;
    } catch (const ValidationError&) {
      throw ParseError(a.line, a.value_col, "unknown preset '" + a.value + "'");
    }
    c.preset = a.value;
  }
  for (const auto& a : assignments) apply(c, a);
  to_scenario(c);  // validation only
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

std::string format_config(const RunConfig& config) {
  RunConfig c = config;  // numeric_keys hands out mutable references
  std::ostringstream os;
  os << "name = " << c.name << "\n";
  if (!c.preset.empty()) os << "preset = " << c.preset << "\n";
  os << "profile = " << (c.profile == ProfileChoice::Tanh ? "tanh" : "constant") << "\n";
  for (const auto& spec : numeric_keys()) {
    os << spec.name << " = " << num(spec.real(c));
    const char* unit = canonical_unit(spec.dim);
    if (*unit) os << " " << unit;
    os << "\n";
  }
  os << "grid_points = " << c.grid_points << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  os << "emit_analytic_reference = " << (c.emit_analytic_reference ? "true" : "false") << "\n";
  os << "spectral_filter = " << (c.spectral_filter ? "true" : "false") << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Presets

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = [] {
    std::vector<PresetInfo> list;
    auto add = [&](std::string name, std::string desc, double gba, double gbc, double delta,
                   double delta_p) {
      PresetInfo p;
      p.name = name;
      p.description = std::move(desc);
      p.config.name = name;
      p.config.params.gamma_ba = gba;
      p.config.params.gamma_bc = gbc;
      p.config.params.delta = delta;
      p.config.params.delta_p = delta_p;
      p.config.out_dir = "out/" + name;
      const auto r = regime_summary(p.config);
      std::ostringstream why;
      if (r.adiabatic.propagation_ratio < kMuchGreater) {
        why << "adiabatic propagation ratio " << r.adiabatic.propagation_ratio << " < "
            << kMuchGreater << "; ";
      }
      if (r.adiabatic.rotation_ratio < kMuchGreater) {
        why << "adiabatic rotation ratio " << r.adiabatic.rotation_ratio << " < " << kMuchGreater
            << "; ";
      }
      if (!r.high_density.ok) {
        why << "high-density ratio " << r.high_density.ratio << " < " << kMuchGreater << "; ";
      }
      p.flag_reason = why.str();
      if (!p.flag_reason.empty()) {
        p.regime_flagged = true;
        p.flag_reason.resize(p.flag_reason.size() - 2);
      }
      list.push_back(std::move(p));
    };
    add("fig2a", "mixing angle vs time (gamma_ba 1e8, gamma_bc 1e4)", 1e8, 1e4, 0, 0);
    add("fig2b", "control Rabi frequency vs time (gamma_ba 1e8, gamma_bc 1e4)", 1e8, 1e4, 0, 0);
    add("fig2c", "group velocity, gamma_ba 1e8, gamma_bc 1e4", 1e8, 1e4, 0, 0);
    add("fig2d", "group velocity, gamma_ba 1e9, gamma_bc 1e4", 1e9, 1e4, 0, 0);
    const char* fig3[] = {"information pulse propagation", "information pulse, storage region",
                          "bright state", "probe field", "atomic coherence sigma_bc"};
    const struct { double gba, gbc; } grid4[] = {{1e8, 1e4}, {1e8, 1e3}, {1e9, 1e4}, {1e9, 1e3}};
    for (int fig = 3; fig <= 7; ++fig) {
      for (int i = 0; i < 4; ++i) {
        double gba = grid4[i].gba, gbc = grid4[i].gbc;
        // The bright-state and probe figures use their own caption pairs.
        if (fig == 5) {
          const double g5[4][2] = {{1e8, 1e4}, {1e8, 1e4}, {1e8, 1e3}, {1e9, 1e4}};
          gba = g5[i][0];
          gbc = g5[i][1];
        } else if (fig == 6) {
          const double g6[4][2] = {{1e8, 1e4}, {1e8, 1e4}, {1e8, 1e4}, {1e8, 1e3}};
          gba = g6[i][0];
          gbc = g6[i][1];
        }
        std::ostringstream desc;
        desc << fig3[fig - 3] << ", gamma_ba " << gba << ", gamma_bc " << gbc;
        add("fig" + std::to_string(fig) + static_cast<char>('a' + i), desc.str(), gba, gbc, 0, 0);
      }
    }
    const double d8[] = {2e6, 4e6, 5e6};
    const double d9[] = {2e2, 4e2, 5e2};
    for (int i = 0; i < 3; ++i) {
      std::ostringstream a, b;
      a << "one-photon detuning " << d8[i] << " rad/s";
      b << "two-photon detuning " << d9[i] << " rad/s";
      add(std::string("fig8") + static_cast<char>('a' + i), a.str(), 1e8, 1e4, d8[i], 0);
      add(std::string("fig9") + static_cast<char>('a' + i), b.str(), 1e8, 1e4, 0, d9[i]);
    }
    add("ideal", "no ground-state decoherence, on resonance (stopped light)", 1e8, 0.0, 0, 0);
    std::sort(list.begin(), list.end(),
              [](const PresetInfo& x, const PresetInfo& y) { return x.name < y.name; });
    return list;
  }();
  return catalog;
}

const PresetInfo& find_preset(std::string_view name) {
  for (const auto& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Regime and limits

RegimeSummary regime_summary(const RunConfig& config) {
  const Scenario s = to_scenario(config);
  RegimeSummary r;
  r.pulse_length = config.pulse.width;
  const bool tanh = config.profile == ProfileChoice::Tanh;
  r.switch_time = tanh ? 1.0 / config.switch_rate : std::numeric_limits<double>::infinity();
  r.storage_time = tanh ? config.t_on - config.t_off : config.t_end;
  r.vg0 = coefficients_reduced(s.params, mixing_state(s.profile, s.params, 0.0)).v_g;
  r.adiabatic = check_adiabatic(s.params, r.pulse_length, r.switch_time, r.vg0);
  r.high_density = check_high_density(s.params);
  r.limits = detuning_limits(s.params, r.pulse_length, r.storage_time);
  return r;
}

std::string format_limits(const RunConfig& config) {
  const auto r = regime_summary(config);
  std::ostringstream os;
  os << "[limits]\n";
  os << "pulse_length = " << num(r.pulse_length) << " m\n";
  os << "storage_time = " << num(r.storage_time) << " s\n";
  os << "delta_p_max = " << num(r.limits.delta_p_max) << " rad/s\n";
  os << "delta_max = " << num(r.limits.delta_max) << " rad/s\n";
  os << "bw_diff_max = " << num(r.limits.bw_diff_max) << " rad/s\n";
  os << "bw_max = " << num(r.limits.bw_max) << " rad/s\n";
  os << "vg_min = " << num(vg_min(config.params)) << " m/s\n";
  os << "[regime]\n";
  os << "adiabatic_ok = " << (r.adiabatic.ok ? "true" : "false") << "\n";
  os << "adiabatic_propagation_ratio = " << num(r.adiabatic.propagation_ratio) << "\n";
  os << "adiabatic_rotation_ratio = " << num(r.adiabatic.rotation_ratio) << "\n";
  os << "high_density_ok = " << (r.high_density.ok ? "true" : "false") << "\n";
  os << "high_density_ratio = " << num(r.high_density.ratio) << "\n";
  os << "vg0 = " << num(r.vg0) << " m/s\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Output files

std::string format_snapshot_csv(const Snapshot& snap) {
  std::string out =
      "z_m,re_psi,im_psi,re_e,im_e,re_sigma_bc,im_sigma_bc,re_phi,im_phi\n";
  out.reserve(out.size() + snap.psi.size() * 9 * 25);
  for (std::size_t i = 0; i < snap.psi.size(); ++i) {
    const cplx values[4] = {snap.psi.values[i], snap.e_field.values[i], snap.sigma_bc.values[i],
                            snap.phi.values[i]};
    out += num(snap.psi.grid.z(i));
    for (const auto& v : values) {
      out += ',';
      out += num(v.real());
      out += ',';
      out += num(v.imag());
    }
    out += '\n';
  }
  return out;
}

std::string format_timeseries_csv(const Trajectory& traj) {
  std::string out = "t_s,theta_rad,omega_rad_s,alpha1,alpha2,beta,vg_m_s,psi_peak,psi_l2\n";
  const double gsn = traj.scenario.params.g_sqrt_n();
  for (const auto& s : traj.snapshots) {
    const double row[] = {s.t,
                          s.mixing.theta,
                          gsn * s.mixing.u,
                          s.coefficients.alpha1,
                          s.coefficients.alpha2,
                          s.coefficients.beta,
                          s.coefficients.v_g,
                          s.psi_peak,
                          s.psi_l2};
    for (std::size_t i = 0; i < std::size(row); ++i) {
      if (i) out += ',';
      out += num(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string format_summary(const RunConfig& config, const Trajectory& traj,
                           const DiagnosticsReport& report, const RegimeSummary& regime) {
  const auto& params = traj.scenario.params;
  std::ostringstream os;
  os << "# eitmem run summary\n[config]\n" << format_config(config);

  os << "\n[regime]\n";
  os << "adiabatic_ok = " << (regime.adiabatic.ok ? "true" : "false") << "\n";
  os << "adiabatic_propagation_ratio = " << num(regime.adiabatic.propagation_ratio) << "\n";
  os << "adiabatic_rotation_ratio = " << num(regime.adiabatic.rotation_ratio) << "\n";
  os << "high_density_ok = " << (regime.high_density.ok ? "true" : "false") << "\n";
  os << "high_density_ratio = " << num(regime.high_density.ratio) << "\n";
  os << "delta_p_max = " << num(regime.limits.delta_p_max) << " rad/s\n";
  os << "delta_max = " << num(regime.limits.delta_max) << " rad/s\n";
  os << "bw_diff_max = " << num(regime.limits.bw_diff_max) << " rad/s\n";
  os << "bw_max = " << num(regime.limits.bw_max) << " rad/s\n";

  os << "\n[diagnostics]\n";
  os << "snapshots = " << traj.snapshots.size() << "\n";
  os << "alpha1_fit = " << num(report.alpha1_fit.rate) << " 1/s\n";
  os << "alpha1_fit_residual = " << num(report.alpha1_fit.residual) << "\n";
  os << "alpha1_fit_points = " << report.alpha1_fit.points << "\n";
  os << "alpha1_fit_l2 = " << num(report.alpha1_fit_l2.rate) << " 1/s\n";
  os << "storage_vg = " << num(report.storage_vg) << " m/s\n";
  os << "distortion = " << num(report.distortion) << "\n";
  os << "fidelity = " << num(report.fidelity) << "\n";
  os << "norm_drift = " << num(report.norm_drift) << "\n";
  os << "norm_conserved = " << (report.norm_drift < 1e-8 ? "true" : "false") << "\n";
  os << "information = " << verdict(report.distortion) << "\n";
  for (std::size_t i = 0; i < report.vg_series.size(); ++i) {
    os << "vg_series_" << i << " = " << num(report.vg_series[i].t) << " s "
       << num(report.vg_series[i].v) << " m/s\n";
  }

  os << "\n[analytic]\n";
  os << "vg_min = " << num(vg_min(params)) << " m/s\n";
  os << "gamma_bc = " << num(params.gamma_bc) << " 1/s\n";
  os << "gamma_bc_decay_peak_ratio = " << num(std::exp(-params.gamma_bc * traj.snapshots.back().t))
     << "\n";
  os << "measured_peak_ratio = "
     << num(traj.snapshots.back().psi_peak / traj.snapshots.front().psi_peak) << "\n";
  for (const auto& [key, value] : report.analytic_comparison) {
    os << key << " = " << num(value) << "\n";
  }

  os << "\n[guard]\n";
  os << "tripped = " << (traj.guard ? "true" : "false") << "\n";
  if (traj.guard) {
    os << "kind = " << to_string(traj.guard->kind) << "\n";
    os << "t = " << num(traj.guard->t) << " s\n";
    os << "message = " << traj.guard->message << "\n";
  }
  return os.str();
}

RunResult run_scenario(const RunConfig& config) {
  RunResult result;
  const Scenario scenario = to_scenario(config);
  EvolveOptions options;
  options.guards = GuardPolicy::Record;
  result.trajectory = evolve(scenario, options);
  result.report = diagnose(result.trajectory);
  const auto regime = regime_summary(config);
  result.summary = format_summary(config, result.trajectory, result.report, regime);

  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  const auto& snaps = result.trajectory.snapshots;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const auto path = dir / indexed("snapshot", i, ".csv");
    write_file(path, format_snapshot_csv(snaps[i]));
    result.files.push_back(path);
  }
  if (config.emit_analytic_reference) {
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      const ComplexField transport = transport_reference(result.trajectory, i);
      ComplexField simple;
      const bool resonant = scenario.params.resonant();
      if (resonant) {
        try {
          simple = predict_output(scenario.input_pulse, scenario.params, scenario.profile,
                                  snaps[i].t, OutputModel::GammaBcDecay, scenario.dt);
        } catch (const Error&) {
          simple = ComplexField();
        }
      }
      std::string csv = "z_m,re_gamma_bc_decay,im_gamma_bc_decay,re_transport,im_transport\n";
      for (std::size_t j = 0; j < transport.size(); ++j) {
        const cplx s = simple.size() ? simple.values[j]
                                     : cplx(std::numeric_limits<double>::quiet_NaN(),
                                            std::numeric_limits<double>::quiet_NaN());
        csv += num(transport.grid.z(j)) + ',' + num(s.real()) + ',' + num(s.imag()) + ',' +
               num(transport.values[j].real()) + ',' + num(transport.values[j].imag()) + '\n';
      }
      const auto path = dir / indexed("reference", i, ".csv");
      write_file(path, csv);
      result.files.push_back(path);
    }
  }
  const auto ts = dir / "timeseries.csv";
  write_file(ts, format_timeseries_csv(result.trajectory));
  result.files.push_back(ts);
  const auto summary = dir / "summary.txt";
  write_file(summary, result.summary);
  result.files.push_back(summary);

  const bool destroyed = !std::isfinite(result.report.distortion) ||
                         result.report.distortion > kDestroyedThreshold;
  result.exit_code = (result.trajectory.guard || destroyed) ? kExitPhysicsGuard : kExitOk;
  return result;
}

}  // namespace eitmem
