#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eitmem/propagator.hpp"

namespace eitmem {

struct VelocitySample {
  double t = 0.0;
  double v = 0.0;  // m/s
};

struct DecayFit {
  double rate = 0.0;      // 1/s, minus the log-slope
  double residual = 0.0;  // rms residual of the log fit
  std::size_t points = 0;
};

/// Distortion above which the stored pulse is treated as undistorted / destroyed.
inline constexpr double kUndistortedThreshold = 0.1;
inline constexpr double kDestroyedThreshold = 1.0;

struct DiagnosticsReport {
  std::vector<VelocitySample> vg_series;
  DecayFit alpha1_fit;     // peak-amplitude decay in the storage window (or whole run)
  DecayFit alpha1_fit_l2;  // same from the L2 norm
  double distortion = 0.0;
  double fidelity = 0.0;
  double storage_vg = 0.0;  // mean centroid velocity inside the storage window
  double norm_drift = 0.0;  // max |l2(t)/l2(0) - 1| over snapshots
  std::map<std::string, double> analytic_comparison;  // relative errors vs closed forms
};

/// |Psi|^2-weighted mean position. Throws DegenerateNorm if the norm underflows.
double centroid(const ComplexField& field);

/// Centroid velocity by centred differences at interior snapshots (a single
/// forward difference when there are exactly two snapshots).
std::vector<VelocitySample> centroid_velocity(const Trajectory& traj);

/// Least-squares decay rate of ln(peak |Psi|) over snapshots with t in the window.
/// Throws WindowTooShort with fewer than three snapshots.
DecayFit fit_decay_rate(const Trajectory& traj, std::pair<double, double> window);
DecayFit fit_decay_rate_l2(const Trajectory& traj, std::pair<double, double> window);

/// Dispersion-free reference for snapshot i: the input moved by int v_g dt and
/// scaled by exp(-int (alpha1 + i beta) dt), using the snapshot's own integrals.
ComplexField transport_reference(const Trajectory& traj, std::size_t snapshot);

/// ||out - e^{i phi} ref|| / ||ref||, minimised over the global phase phi.
double distortion_metric(const ComplexField& out, const ComplexField& reference);
double distortion_metric(const Trajectory& traj);  // final snapshot vs transport reference

/// |<ref, out>| / (||ref|| ||out||). Throws DegenerateNorm if either norm vanishes.
double storage_fidelity(const ComplexField& out, const ComplexField& reference);
double storage_fidelity(const Trajectory& traj);

/// Everything above plus relative errors against the closed-form predictions.
DiagnosticsReport diagnose(const Trajectory& traj);

}  // namespace eitmem
