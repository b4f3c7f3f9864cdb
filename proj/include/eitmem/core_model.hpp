#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace eitmem {

using cplx = std::complex<double>;

/// Atomic and medium constants, all SI (rates in rad/s, lengths in m).
struct PhysicalParams {
  double g = 1.0e6;             // vacuum Rabi frequency
  double n_atoms = 1.0e8;       // N
  double gamma_ba = 1.0e8;      // optical coherence decay
  double gamma_bc = 1.0e4;      // ground-state coherence decay
  double delta = 0.0;           // one-photon detuning
  double delta_p = 0.0;         // two-photon detuning
  double c_light = 299792458.0;
  double cell_length = 5.0e-3;

  /// g^2 N, the collective coupling squared.
  double g2n() const { return g * g * n_atoms; }
  /// g sqrt(N), the collective coupling (rad/s).
  double g_sqrt_n() const;
  bool resonant() const { return delta == 0.0 && delta_p == 0.0; }

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  bool operator==(const PhysicalParams&) const = default;
};

/// The values used throughout the numerical section of the model: g = 1e6 rad/s,
/// N = 1e8, L = 5 mm, gamma_ba = 1e8, gamma_bc = 1e4, on resonance.
PhysicalParams reference_params();

enum class ProfileKind { TanhSwitch, ConstantTheta, Custom };

/// Control field expressed through u(t) = cot(theta(t)) = Omega(t) / (g sqrt(N)).
///
/// TanhSwitch turns the control off around t_off and back on around t_on:
///   u(t) = u_scale * (1 - 0.5 tanh(r (t - t_off)) + 0.5 tanh(r (t - t_on)))
/// u is clamped below at omega_floor / (g sqrt N) so tan(theta) stays finite.
class ControlProfile {
 public:
  using Fn = std::function<double(double)>;

  static ControlProfile tanh_switch(double u_scale = 5.0e-4, double switch_rate = 1.0e5,
                                    double t_off = 30.0e-6, double t_on = 125.0e-6,
                                    double omega_floor = 1.0e-3);
  static ControlProfile constant_theta(double theta, double omega_floor = 1.0e-3);
  /// u and du are cot(theta) and its time derivative.
  static ControlProfile custom(Fn u, Fn du, double omega_floor = 1.0e-3);

  ProfileKind kind() const { return kind_; }
  double u_scale() const { return u_scale_; }
  double switch_rate() const { return switch_rate_; }
  double t_off() const { return t_off_; }
  double t_on() const { return t_on_; }
  double omega_floor() const { return omega_floor_; }
  double constant_theta_value() const { return theta_; }

  /// Unclamped u(t) and u'(t).
  double raw_u(double t) const;
  double raw_du(double t) const;

  /// Interval with the control effectively off: [t_off + 3/r, t_on - 3/r].
  /// Only meaningful for TanhSwitch; other kinds return an empty interval.
  std::pair<double, double> storage_window() const;
  /// True when t lies in a control-on interval (t <= t_off - 3/r or t >= t_on + 3/r).
  bool control_on(double t) const;

 private:
  ProfileKind kind_ = ProfileKind::TanhSwitch;
  double u_scale_ = 5.0e-4;
  double switch_rate_ = 1.0e5;
  double t_off_ = 30.0e-6;
  double t_on_ = 125.0e-6;
  double omega_floor_ = 1.0e-3;
  double theta_ = 0.0;
  Fn u_;
  Fn du_;
};

/// Everything the coefficient formulas need about the mixing angle at one
/// instant, evaluated from u = cot(theta) to avoid cancellation near pi/2.
struct MixingState {
  double theta = 0.0;
  double theta_dot = 0.0;
  double u = 0.0;            // cot(theta), after clamping
  double sin2 = 0.0;         // sin^2(theta)
  double cos2 = 0.0;         // cos^2(theta)
  double tan_theta = 0.0;    // 1/u; +inf at theta = pi/2
  double tan_theta_dot = 0;  // tan(theta) * theta_dot, finite by construction

  static MixingState from_angle(double theta, double theta_dot);
};

MixingState mixing_state(const ControlProfile& profile, const PhysicalParams& params, double t);

double theta_of_t(const ControlProfile& profile, const PhysicalParams& params, double t);
double omega_of_t(const ControlProfile& profile, const PhysicalParams& params, double t);
double theta_dot(const ControlProfile& profile, const PhysicalParams& params, double t);

/// Uniform periodic grid on [z_min, z_max) with n_points samples.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(double z_min, double z_max, std::size_t n_points);

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  std::size_t size() const { return n_; }
  double length() const { return z_max_ - z_min_; }
  double dz() const { return length() / static_cast<double>(n_); }
  double dk() const;
  double z(std::size_t i) const { return z_min_ + dz() * static_cast<double>(i); }
  /// Wavenumbers in discrete-Fourier order: 0, dk, ..., (n/2-1)dk, -n/2 dk, ..., -dk.
  const std::vector<double>& k_values() const { return k_; }
  double k_max() const;

  bool operator==(const SpatialGrid& o) const {
    return z_min_ == o.z_min_ && z_max_ == o.z_max_ && n_ == o.n_;
  }

 private:
  double z_min_ = 0.0;
  double z_max_ = 0.0;
  std::size_t n_ = 0;
  std::vector<double> k_;
};

/// Grid used unless a scenario overrides it.
SpatialGrid default_grid();

/// Complex envelope samples on a grid.
struct ComplexField {
  SpatialGrid grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(SpatialGrid g) : grid(std::move(g)), values(grid.size()) {}
  ComplexField(SpatialGrid g, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
  double peak() const;
  double l2_norm() const;  // sqrt(sum |v|^2 dz)
};

struct GaussianPulse {
  double amplitude = 0.2;
  double center = 1.5e-3;
  double width = 1.0e-3;  // 1/e half-width of the amplitude

  bool operator==(const GaussianPulse&) const = default;
};

/// amplitude * exp(-((z - center)/width)^2)
ComplexField gaussian_pulse(const SpatialGrid& grid, const GaussianPulse& pulse);

struct Scenario {
  PhysicalParams params;
  ControlProfile profile;
  SpatialGrid grid;
  ComplexField input_pulse;
  double t_end = 165.0e-6;
  double dt = 1.0e-7;
  double snapshot_every = 15.0e-6;
  bool spectral_filter = false;

  /// Params, grid/pulse consistency, boundary clearance and time resolution.
  void validate() const;
  /// Snapshot times 0, s, 2s, ... up to t_end (t_end always included).
  std::vector<double> snapshot_times() const;
};

/// Reference scenario: reference_params(), tanh switch, Gaussian input, default grid.
Scenario reference_scenario();

struct AdiabaticReport {
  bool ok = false;
  double propagation_ratio = 0.0;  // L_p / sqrt(gamma_ba c L / g^2 N)
  double rotation_ratio = 0.0;     // T_r / ((gamma_ba / g^2 N)(v_g0 / c))
};

struct HighDensityReport {
  bool ok = false;
  double ratio = 0.0;  // g^2 N / |(i(D + Dp) + gamma_ba)(i Dp + gamma_bc)|
};

/// "Much greater than" is taken as a factor of at least this.
inline constexpr double kMuchGreater = 10.0;

AdiabaticReport check_adiabatic(const PhysicalParams& params, double pulse_length,
                                double switch_time, double vg0);
HighDensityReport check_high_density(const PhysicalParams& params);

}  // namespace eitmem
