#include "eitmem/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "eitmem/errors.hpp"

namespace eitmem {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::OutOfCell: return "OutOfCell";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::WraparoundDetected: return "WraparoundDetected";
    case ErrorKind::OverflowGuard: return "OverflowGuard";
    case ErrorKind::DegenerateNorm: return "DegenerateNorm";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Error";
}

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw ValidationError(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

// ---------------------------------------------------------------------------
// PhysicalParams

double PhysicalParams::g_sqrt_n() const { return g * std::sqrt(n_atoms); }

void PhysicalParams::validate() const {
  require(finite(g) && g > 0.0, "g > 0");
  require(finite(n_atoms) && n_atoms > 0.0, "n_atoms > 0");
  require(finite(gamma_ba) && gamma_ba > 0.0, "gamma_ba > 0");
  require(finite(gamma_bc) && gamma_bc >= 0.0, "gamma_bc >= 0");
  require(finite(delta), "delta finite");
  require(finite(delta_p), "delta_p finite");
  require(finite(c_light) && c_light > 0.0, "c_light > 0");
  require(finite(cell_length) && cell_length > 0.0, "cell_length > 0");
  const double g2n_value = g2n();
  require(finite(g2n_value) && g2n_value > 0.0, "g^2 N finite and positive");
}

PhysicalParams reference_params() { return PhysicalParams{}; }

// ---------------------------------------------------------------------------
// ControlProfile

ControlProfile ControlProfile::tanh_switch(double u_scale, double switch_rate, double t_off,
                                           double t_on, double omega_floor) {
  require(finite(u_scale) && u_scale > 0.0, "u_scale > 0");
  require(finite(switch_rate) && switch_rate > 0.0, "switch_rate > 0");
  require(finite(t_off) && finite(t_on) && t_off < t_on, "t_off < t_on");
  require(finite(omega_floor) && omega_floor > 0.0, "omega_floor > 0");
  ControlProfile p;
  p.kind_ = ProfileKind::TanhSwitch;
  p.u_scale_ = u_scale;
  p.switch_rate_ = switch_rate;
  p.t_off_ = t_off;
  p.t_on_ = t_on;
  p.omega_floor_ = omega_floor;
  return p;
}

ControlProfile ControlProfile::constant_theta(double theta, double omega_floor) {
  require(finite(theta) && theta > 0.0 && theta <= std::numbers::pi / 2,
          "constant theta in (0, pi/2]");
  require(finite(omega_floor) && omega_floor > 0.0, "omega_floor > 0");
  ControlProfile p;
  p.kind_ = ProfileKind::ConstantTheta;
  p.theta_ = theta;
  p.omega_floor_ = omega_floor;
  return p;
}

ControlProfile ControlProfile::custom(Fn u, Fn du, double omega_floor) {
  require(static_cast<bool>(u) && static_cast<bool>(du), "custom profile needs u and du");
  require(finite(omega_floor) && omega_floor > 0.0, "omega_floor > 0");
  ControlProfile p;
  p.kind_ = ProfileKind::Custom;
  p.omega_floor_ = omega_floor;
  p.u_ = std::move(u);
  p.du_ = std::move(du);
  return p;
}

double ControlProfile::raw_u(double t) const {
  switch (kind_) {
    case ProfileKind::TanhSwitch:
      return u_scale_ * (1.0 - 0.5 * std::tanh(switch_rate_ * (t - t_off_)) +
                         0.5 * std::tanh(switch_rate_ * (t - t_on_)));
    case ProfileKind::ConstantTheta:
      return std::cos(theta_) / std::sin(theta_);
    case ProfileKind::Custom:
      return u_(t);
  }
  return 0.0;
}

double ControlProfile::raw_du(double t) const {
  switch (kind_) {
    case ProfileKind::TanhSwitch: {
      // d/dx tanh(x) = sech^2(x) = 1 - tanh^2(x), but 1/cosh^2 keeps the tails accurate.
      const double c_off = std::cosh(switch_rate_ * (t - t_off_));
      const double c_on = std::cosh(switch_rate_ * (t - t_on_));
      return u_scale_ * 0.5 * switch_rate_ * (-1.0 / (c_off * c_off) + 1.0 / (c_on * c_on));
    }
    case ProfileKind::ConstantTheta:
      return 0.0;
    case ProfileKind::Custom:
      return du_(t);
  }
  return 0.0;
}

std::pair<double, double> ControlProfile::storage_window() const {
  if (kind_ != ProfileKind::TanhSwitch) return {0.0, 0.0};
  return {t_off_ + 3.0 / switch_rate_, t_on_ - 3.0 / switch_rate_};
}

bool ControlProfile::control_on(double t) const {
  if (kind_ != ProfileKind::TanhSwitch) return true;
  return t <= t_off_ - 3.0 / switch_rate_ || t >= t_on_ + 3.0 / switch_rate_;
}

// ---------------------------------------------------------------------------
// Mixing angle

namespace {

void fill_from_u(MixingState& m, double u, double du) {
  m.u = u;
  if (u <= 1.0) {
    m.sin2 = 1.0 / (1.0 + u * u);
    m.cos2 = u * u * m.sin2;
  } else {
    const double w = 1.0 / u;
    m.cos2 = 1.0 / (1.0 + w * w);
    m.sin2 = w * w * m.cos2;
  }
  m.theta = std::atan2(1.0, u);
  m.theta_dot = -du * m.sin2;  // -u' / (1 + u^2)
  m.tan_theta = 1.0 / u;
  m.tan_theta_dot = du == 0.0 ? 0.0 : -du * m.sin2 / u;
}

}  // namespace

MixingState MixingState::from_angle(double theta, double theta_dot) {
  MixingState m;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  m.theta = theta;
  m.theta_dot = theta_dot;
  m.sin2 = s * s;
  m.cos2 = c * c;
  m.u = s == 0.0 ? std::numeric_limits<double>::infinity() : c / s;
  m.tan_theta = s / c;
  m.tan_theta_dot = theta_dot == 0.0 ? 0.0 : m.tan_theta * theta_dot;
  return m;
}

MixingState mixing_state(const ControlProfile& profile, const PhysicalParams& params, double t) {
  const double u_floor = profile.omega_floor() / params.g_sqrt_n();
  double u = profile.raw_u(t);
  double du = profile.raw_du(t);
  if (!(u > u_floor)) {
    u = u_floor;
    du = 0.0;
  }
  MixingState m;
  fill_from_u(m, u, du);
  return m;
}

double theta_of_t(const ControlProfile& profile, const PhysicalParams& params, double t) {
  return mixing_state(profile, params, t).theta;
}

double omega_of_t(const ControlProfile& profile, const PhysicalParams& params, double t) {
  return params.g_sqrt_n() * mixing_state(profile, params, t).u;
}

double theta_dot(const ControlProfile& profile, const PhysicalParams& params, double t) {
  return mixing_state(profile, params, t).theta_dot;
}

// ---------------------------------------------------------------------------
// Grid and fields

SpatialGrid::SpatialGrid(double z_min, double z_max, std::size_t n_points)
    : z_min_(z_min), z_max_(z_max), n_(n_points) {
  require(finite(z_min) && finite(z_max) && z_max > z_min, "z_max > z_min");
  require(n_points >= 256, "n_points >= 256");
  require((n_points & (n_points - 1)) == 0, "n_points is a power of two");
  k_.resize(n_);
  const double step = dk();
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    auto m = static_cast<std::ptrdiff_t>(i);
    if (m >= half) m -= static_cast<std::ptrdiff_t>(n_);
    k_[i] = step * static_cast<double>(m);
  }
}

double SpatialGrid::dk() const { return 2.0 * std::numbers::pi / length(); }

double SpatialGrid::k_max() const { return dk() * static_cast<double>(n_ / 2); }

SpatialGrid default_grid() { return SpatialGrid(-5.0e-3, 15.0e-3, 16384); }

ComplexField::ComplexField(SpatialGrid g, std::vector<cplx> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "field size != grid size");
}

double ComplexField::peak() const {
  double p = 0.0;
  for (const auto& v : values) p = std::max(p, std::abs(v));
  return p;
}

double ComplexField::l2_norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * grid.dz());
}

ComplexField gaussian_pulse(const SpatialGrid& grid, const GaussianPulse& pulse) {
  ComplexField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = (grid.z(i) - pulse.center) / pulse.width;
    f.values[i] = pulse.amplitude * std::exp(-x * x);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  params.validate();
  require(grid.size() >= 256, "grid initialised");
  require(input_pulse.grid == grid, "input pulse lives on the scenario grid");
  require(finite(t_end) && t_end > 0.0, "t_end > 0");
  require(finite(dt) && dt > 0.0 && dt <= t_end, "0 < dt <= t_end");
  require(finite(snapshot_every) && snapshot_every >= dt, "snapshot_every >= dt");
  if (profile.kind() == ProfileKind::TanhSwitch) {
    require(dt <= 1.0 / (10.0 * profile.switch_rate()), "dt <= 1/(10 switch_rate)");
  }
  const double peak = input_pulse.peak();
  require(peak > 0.0, "input pulse is non-zero");
  const double edge = std::max(std::abs(input_pulse.values.front()),
                               std::abs(input_pulse.values.back()));
  require(edge < 1.0e-6 * peak, "input pulse at grid boundaries < 1e-6 x peak");
}

std::vector<double> Scenario::snapshot_times() const {
  std::vector<double> times;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * snapshot_every;
    if (t > t_end * (1.0 + 1e-12)) break;
    times.push_back(std::min(t, t_end));
  }
  if (t_end - times.back() > 1e-12 * t_end) times.push_back(t_end);
  return times;
}

Scenario reference_scenario() {
  Scenario s;
  s.params = reference_params();
  s.profile = ControlProfile::tanh_switch();
  s.grid = default_grid();
  s.input_pulse = gaussian_pulse(s.grid, GaussianPulse{});
  return s;
}

// ---------------------------------------------------------------------------
// Regime checks

AdiabaticReport check_adiabatic(const PhysicalParams& params, double pulse_length,
                                double switch_time, double vg0) {
  AdiabaticReport r;
  const double inf = std::numeric_limits<double>::infinity();
  const double rhs_a =
      std::sqrt(params.gamma_ba * params.c_light * params.cell_length / params.g2n());
  const double rhs_b = (params.gamma_ba / params.g2n()) * (vg0 / params.c_light);
  r.propagation_ratio = rhs_a > 0.0 ? pulse_length / rhs_a : inf;
  r.rotation_ratio = rhs_b > 0.0 ? switch_time / rhs_b : inf;
  r.ok = r.propagation_ratio >= kMuchGreater && r.rotation_ratio >= kMuchGreater;
  return r;
}

HighDensityReport check_high_density(const PhysicalParams& params) {
  HighDensityReport r;
  const cplx optical(params.gamma_ba, params.delta + params.delta_p);
  const cplx ground(params.gamma_bc, params.delta_p);
  const double denom = std::abs(optical * ground);
  r.ratio = denom > 0.0 ? params.g2n() / denom : std::numeric_limits<double>::infinity();
  r.ok = r.ratio >= kMuchGreater;
  return r;
}

}  // namespace eitmem
