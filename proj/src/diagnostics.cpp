#include "eitmem/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "eitmem/kernels.hpp"

namespace eitmem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid == b.grid) || a.size() != b.size()) {
    throw Error(ErrorKind::GridMismatch, "fields live on different grids");
  }
}

std::vector<std::size_t> in_window(const Trajectory& traj, std::pair<double, double> w) {
  std::vector<std::size_t> idx;
  const double slack = 1e-12 * std::max(std::abs(w.first), std::abs(w.second));
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const double t = traj.snapshots[i].t;
    if (t >= w.first - slack && t <= w.second + slack) idx.push_back(i);
  }
  return idx;
}

DecayFit log_slope_fit(const Trajectory& traj, std::pair<double, double> window, bool use_l2) {
  const auto idx = in_window(traj, window);
  if (idx.size() < 3) {
    throw Error(ErrorKind::WindowTooShort,
                "decay fit needs >= 3 snapshots in window, got " + std::to_string(idx.size()));
  }
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (auto i : idx) {
    const auto& s = traj.snapshots[i];
    const double amp = use_l2 ? s.psi_l2 : s.psi_peak;
    if (!(amp > 0.0)) throw Error(ErrorKind::DegenerateNorm, "zero amplitude in decay window");
    pts.emplace_back(s.t, std::log(amp));
  }
  const double n = static_cast<double>(pts.size());
  // Centre t for conditioning; the slope is unaffected.
  double t_mean = 0.0;
  for (const auto& [t, y] : pts) t_mean += t / n;
  for (const auto& [t, y] : pts) {
    const double x = t - t_mean;
    st += x;
    sy += y;
    stt += x * x;
    sty += x * y;
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  const double intercept = (sy - slope * st) / n;
  double ss = 0.0;
  for (const auto& [t, y] : pts) {
    const double r = y - (intercept + slope * (t - t_mean));
    ss += r * r;
  }
  return DecayFit{-slope, std::sqrt(ss / n), pts.size()};
}

std::pair<double, double> decay_window(const Trajectory& traj) {
  const auto& profile = traj.scenario.profile;
  if (profile.kind() == ProfileKind::TanhSwitch) {
    const auto w = profile.storage_window();
    if (in_window(traj, w).size() >= 3) return w;
  }
  return {0.0, traj.scenario.t_end};
}

double relative_error(double measured, double expected) {
  if (expected == 0.0) return std::abs(measured);
  return std::abs(measured - expected) / std::abs(expected);
}

}  // namespace

double centroid(const ComplexField& field) {
  const auto m = kernels::moments(field.values, field.grid.z_min(), field.grid.dz());
  if (!(m.sum_sq > 0.0) || !std::isnormal(m.sum_sq)) {
    throw Error(ErrorKind::DegenerateNorm, "integral of |Psi|^2 underflowed");
  }
  return m.sum_z_sq / m.sum_sq;
}

std::vector<VelocitySample> centroid_velocity(const Trajectory& traj) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 2) {
    throw Error(ErrorKind::WindowTooShort, "centroid velocity needs >= 2 snapshots");
  }
  std::vector<double> zbar(snaps.size());
  for (std::size_t i = 0; i < snaps.size(); ++i) zbar[i] = centroid(snaps[i].psi);

  std::vector<VelocitySample> out;
  if (snaps.size() == 2) {
    out.push_back({0.5 * (snaps[0].t + snaps[1].t), (zbar[1] - zbar[0]) / (snaps[1].t - snaps[0].t)});
    return out;
  }
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    out.push_back({snaps[i].t, (zbar[i + 1] - zbar[i - 1]) / (snaps[i + 1].t - snaps[i - 1].t)});
  }
  return out;
}

DecayFit fit_decay_rate(const Trajectory& traj, std::pair<double, double> window) {
  return log_slope_fit(traj, window, false);
}

DecayFit fit_decay_rate_l2(const Trajectory& traj, std::pair<double, double> window) {
  return log_slope_fit(traj, window, true);
}

ComplexField transport_reference(const Trajectory& traj, std::size_t snapshot) {
  const auto& s = traj.snapshots.at(snapshot);
  const auto& grid = traj.scenario.grid;
  const Spectrum spec0 = forward_ft(traj.scenario.input_pulse);
  std::vector<cplx> out(grid.size());
  // Same propagation kernel as evolve, with the k-dependent loss switched off.
  kernels::propagate(spec0.values, grid.k_values(), {}, s.integrals.rate0(),
                     cplx(0.0, s.integrals.v_g), out);
  return inverse_ft(Spectrum{grid, std::move(out)});
}

double distortion_metric(const ComplexField& out, const ComplexField& reference) {
  require_same_grid(out, reference);
  cplx overlap{};
  double ref_sq = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    overlap += std::conj(reference.values[i]) * out.values[i];
    ref_sq += std::norm(reference.values[i]);
  }
  if (!(ref_sq > 0.0)) throw Error(ErrorKind::DegenerateNorm, "reference has zero norm");
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0, 0.0);
  double diff_sq = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    diff_sq += std::norm(out.values[i] - phase * reference.values[i]);
  }
  return std::sqrt(diff_sq / ref_sq);
}

double distortion_metric(const Trajectory& traj) {
  const std::size_t last = traj.snapshots.size() - 1;
  return distortion_metric(traj.snapshots[last].psi, transport_reference(traj, last));
}

double storage_fidelity(const ComplexField& out, const ComplexField& reference) {
  require_same_grid(out, reference);
  cplx overlap{};
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    overlap += std::conj(reference.values[i]) * out.values[i];
    a += std::norm(out.values[i]);
    b += std::norm(reference.values[i]);
  }
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::DegenerateNorm, "fidelity of a zero or non-finite field");
  }
  return std::abs(overlap) / std::sqrt(a * b);
}

double storage_fidelity(const Trajectory& traj) {
  const std::size_t last = traj.snapshots.size() - 1;
  return storage_fidelity(traj.snapshots[last].psi, transport_reference(traj, last));
}

DiagnosticsReport diagnose(const Trajectory& traj) {
  DiagnosticsReport r;
  const auto& sc = traj.scenario;
  const auto& snaps = traj.snapshots;
  const auto& params = sc.params;

  if (snaps.size() >= 2) r.vg_series = centroid_velocity(traj);

  const auto window = decay_window(traj);
  if (in_window(traj, window).size() >= 3) {
    r.alpha1_fit = fit_decay_rate(traj, window);
    r.alpha1_fit_l2 = fit_decay_rate_l2(traj, window);
  } else {
    r.alpha1_fit.rate = r.alpha1_fit_l2.rate = kNaN;
  }

  try {
    r.distortion = distortion_metric(traj);
    r.fidelity = storage_fidelity(traj);
  } catch (const Error&) {
    r.distortion = r.fidelity = kNaN;
  }

  const double l2_0 = snaps.front().psi_l2;
  for (const auto& s : snaps) r.norm_drift = std::max(r.norm_drift, std::abs(s.psi_l2 / l2_0 - 1.0));

  // Storage-window drift from the first and last snapshot inside the window.
  r.storage_vg = kNaN;
  if (sc.profile.kind() == ProfileKind::TanhSwitch) {
    const auto idx = in_window(traj, sc.profile.storage_window());
    if (idx.size() >= 2) {
      const auto& a = snaps[idx.front()];
      const auto& b = snaps[idx.back()];
      r.storage_vg = (centroid(b.psi) - centroid(a.psi)) / (b.t - a.t);
    }
  }

  auto& cmp = r.analytic_comparison;
  if (params.resonant() && std::isfinite(r.storage_vg) && params.gamma_bc > 0.0) {
    cmp["storage_vg_vs_vg_min"] = relative_error(r.storage_vg, vg_min(params));
  }
  if (std::isfinite(r.alpha1_fit.rate) && params.gamma_bc > 0.0) {
    cmp["alpha1_fit_vs_gamma_bc"] = relative_error(r.alpha1_fit.rate, params.gamma_bc);
  }
  if (params.resonant()) {
    const double expected = std::exp(-params.gamma_bc * snaps.back().t);
    cmp["peak_ratio_vs_gamma_bc_decay"] =
        relative_error(snaps.back().psi_peak / snaps.front().psi_peak, expected);
  }
  if (snaps.size() >= 3) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
      const double mean_vg = (snaps[i + 1].integrals.v_g - snaps[i - 1].integrals.v_g) /
                             (snaps[i + 1].t - snaps[i - 1].t);
      worst = std::max(worst, relative_error(r.vg_series[i - 1].v, mean_vg));
    }
    cmp["vg_series_vs_integrated_vg"] = worst;
  }
  return r;
}

}  // namespace eitmem
