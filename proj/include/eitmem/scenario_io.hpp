#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eitmem/diagnostics.hpp"
#include "eitmem/propagator.hpp"

namespace eitmem {

enum class ProfileChoice { Tanh, Constant };

/// Everything needed to build and run one scenario. All quantities SI.
struct RunConfig {
  std::string name = "custom";
  std::string preset;  // base preset the config was derived from, if any

  PhysicalParams params;

  ProfileChoice profile = ProfileChoice::Tanh;
  double u_scale = 5.0e-4;
  double switch_rate = 1.0e5;
  double t_off = 30.0e-6;
  double t_on = 125.0e-6;
  double omega_floor = 1.0e-3;
  double theta = 1.5707963267948966;  // ConstantTheta only

  GaussianPulse pulse;
  double z_min = -5.0e-3;
  double z_max = 15.0e-3;
  std::size_t grid_points = 16384;

  double t_end = 165.0e-6;
  double dt = 1.0e-7;
  double snapshot_every = 15.0e-6;

  std::string out_dir = "out";
  bool emit_analytic_reference = false;
  bool spectral_filter = false;

  bool operator==(const RunConfig&) const = default;
};

/// Builds and validates the scenario (throws ValidationError).
Scenario to_scenario(const RunConfig& config);

/// Parses the line-oriented `key = value [unit]` format. Lines may carry
/// `#` comments; a `[config]` section header is optional, and when present
/// every other section is skipped (so a summary file re-parses).
/// Throws ParseError (with line/column) or ValidationError.
RunConfig load_config_text(std::string_view text);
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical `key = value unit` lines, floats with 17 significant digits.
std::string format_config(const RunConfig& config);

struct PresetInfo {
  std::string name;
  std::string description;
  RunConfig config;
  bool regime_flagged = false;  // deliberately outside a regime check
  std::string flag_reason;
};

const std::vector<PresetInfo>& preset_catalog();
/// Throws ValidationError for an unknown name.
const PresetInfo& find_preset(std::string_view name);

struct RegimeSummary {
  AdiabaticReport adiabatic;
  HighDensityReport high_density;
  DetuningLimits limits;
  double pulse_length = 0.0;
  double switch_time = 0.0;
  double storage_time = 0.0;
  double vg0 = 0.0;
};

/// Regime checks with L_p = pulse width, T_r = 1/switch_rate, T0 = t_on - t_off
/// and v_g0 = v_g(t = 0).
RegimeSummary regime_summary(const RunConfig& config);
std::string format_limits(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitPhysicsGuard = 3;

struct RunResult {
  int exit_code = kExitOk;
  Trajectory trajectory;
  DiagnosticsReport report;
  std::string summary;
  std::vector<std::filesystem::path> files;
};

/// Runs the scenario and writes snapshot_NNNN.csv, timeseries.csv,
/// summary.txt (and reference_NNNN.csv when requested) into config.out_dir.
/// Guard trips are recorded; the exit code is 3 when a guard tripped or the
/// output is destroyed (distortion > 1).
RunResult run_scenario(const RunConfig& config);

/// Individual writers, exposed for tests.
std::string format_snapshot_csv(const Snapshot& snap);
std::string format_timeseries_csv(const Trajectory& traj);
std::string format_summary(const RunConfig& config, const Trajectory& traj,
                           const DiagnosticsReport& report, const RegimeSummary& regime);

}  // namespace eitmem
