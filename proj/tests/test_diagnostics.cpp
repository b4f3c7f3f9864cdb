#include <doctest.h>

#include <cmath>

#include "eitmem/diagnostics.hpp"
#include "eitmem/errors.hpp"
#include "support.hpp"

using namespace eitmem;
using testing::rel_err;

namespace {

// Hand-built trajectory: a gaussian moving at v and decaying at rate a.
Trajectory synthetic(double v, double a, std::vector<double> times) {
  Trajectory traj;
  traj.scenario = testing::small_scenario(4096);
  for (double t : times) {
    Snapshot s;
    s.t = t;
    s.psi = gaussian_pulse(traj.scenario.grid,
                           GaussianPulse{0.2 * std::exp(-a * t), 1.5e-3 + v * t, 1e-3});
    s.psi_peak = s.psi.peak();
    s.psi_l2 = s.psi.l2_norm();
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an eitmem::Error");
  return ErrorKind::ValidationError;
}

}  // namespace

TEST_CASE("centroid") {
  const SpatialGrid g(-5e-3, 15e-3, 4096);
  const auto f = gaussian_pulse(g, GaussianPulse{0.2, 2.0e-3, 1e-3});
  CHECK(centroid(f) == doctest::Approx(2.0e-3).epsilon(1e-12));
  CHECK(kind_of([&] { centroid(ComplexField(g)); }) == ErrorKind::DegenerateNorm);
}

TEST_CASE("centroid velocity by centred differences") {
  const auto traj = synthetic(40.0, 0.0, {0.0, 10e-6, 20e-6, 30e-6});
  const auto vs = centroid_velocity(traj);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].t == 10e-6);
  for (const auto& s : vs) CHECK(s.v == doctest::Approx(40.0).epsilon(1e-8));

  const auto two = centroid_velocity(synthetic(-7.0, 0.0, {0.0, 50e-6}));
  REQUIRE(two.size() == 1);
  CHECK(two[0].v == doctest::Approx(-7.0).epsilon(1e-8));
  CHECK(kind_of([&] { centroid_velocity(synthetic(1.0, 0.0, {0.0})); }) ==
        ErrorKind::WindowTooShort);
}

TEST_CASE("decay-rate fit") {
  // Off-grid centres bias the sampled peak by ~(dz/w)^2, hence the looser peak tolerance.
  const auto traj = synthetic(3.0, 2.5e3, {0.0, 10e-6, 20e-6, 30e-6, 40e-6});
  const auto fit = fit_decay_rate(traj, {0.0, 40e-6});
  CHECK(fit.rate == doctest::Approx(2.5e3).epsilon(1e-4));
  CHECK(fit.residual < 1e-5);
  CHECK(fit.points == 5);
  CHECK(fit_decay_rate_l2(traj, {0.0, 40e-6}).rate == doctest::Approx(2.5e3).epsilon(1e-9));
  CHECK(fit_decay_rate(traj, {10e-6, 30e-6}).points == 3);
  CHECK(kind_of([&] { fit_decay_rate(traj, {0.0, 15e-6}); }) == ErrorKind::WindowTooShort);
}

TEST_CASE("distortion and fidelity primitives") {
  const SpatialGrid g(-5e-3, 15e-3, 4096);
  const auto f = gaussian_pulse(g, GaussianPulse{});
  ComplexField rotated(g);
  for (std::size_t i = 0; i < g.size(); ++i) rotated.values[i] = f.values[i] * std::polar(0.3, 1.1);
  CHECK(distortion_metric(f, f) == 0.0);
  // Decay and a global phase are not distortion once the reference carries the same decay.
  ComplexField scaled_ref(g);
  for (std::size_t i = 0; i < g.size(); ++i) scaled_ref.values[i] = f.values[i] * 0.3;
  CHECK(distortion_metric(rotated, scaled_ref) < 1e-14);
  CHECK(storage_fidelity(rotated, f) == doctest::Approx(1.0).epsilon(1e-14));

  const auto shifted = gaussian_pulse(g, GaussianPulse{0.2, 2.0e-3, 1e-3});
  // ||f - g|| / ||g|| for equal gaussians offset by d: sqrt(2 - 2 exp(-d^2 / (2 w^2))), d = 0.5 mm
  CHECK(distortion_metric(shifted, f) ==
        doctest::Approx(std::sqrt(2 - 2 * std::exp(-0.125))).epsilon(1e-9));
  CHECK(storage_fidelity(shifted, f) == doctest::Approx(std::exp(-0.125)).epsilon(1e-9));

  const SpatialGrid other(-5e-3, 15e-3, 2048);
  CHECK(kind_of([&] { distortion_metric(f, gaussian_pulse(other, GaussianPulse{})); }) ==
        ErrorKind::GridMismatch);
  CHECK(kind_of([&] { storage_fidelity(ComplexField(g), f); }) == ErrorKind::DegenerateNorm);
}

TEST_CASE("resonant run diagnostics") {
  auto s = reference_scenario();
  s.snapshot_every = 1e-6;
  const auto traj = evolve(s);
  const auto rep = diagnose(traj);

  // With the control on the pulse moves at ~ 75 + 3 m/s.
  std::size_t on_samples = 0;
  for (const auto& v : rep.vg_series) {
    if (!s.profile.control_on(v.t)) continue;
    ++on_samples;
    CHECK(v.v == doctest::Approx(78.0).epsilon(0.1));
  }
  CHECK(on_samples >= 5);
  CHECK(rep.storage_vg == doctest::Approx(3.0).epsilon(0.1));
  CHECK(rep.alpha1_fit.rate == doctest::Approx(1e4).epsilon(0.05));
  CHECK(rep.fidelity > 0.99);
  CHECK(rep.fidelity <= 1.0 + 1e-9);
  CHECK(rep.distortion < 1e-12);

  const auto out = predict_output(s.input_pulse, s.params, s.profile, s.t_end,
                                  OutputModel::GammaBcDecay, s.dt);
  CHECK(distortion_metric(traj.snapshots.back().psi, out) < 0.05);
}

TEST_CASE("slower decay at gamma_bc = 1e3") {
  const auto traj = evolve(testing::from_preset("fig3b"));
  const auto fit = fit_decay_rate(traj, traj.scenario.profile.storage_window());
  CHECK(fit.rate == doctest::Approx(1e3).epsilon(0.05));
}

TEST_CASE("ideal run diagnostics") {
  const auto traj = evolve(testing::from_preset("ideal"));
  const auto rep = diagnose(traj);
  CHECK(std::abs(rep.alpha1_fit.rate) < 10.0);
  CHECK(std::abs(rep.storage_vg) < 1e-3);
  CHECK(rep.fidelity == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.norm_drift < 1e-8);
}

TEST_CASE("detuned runs") {
  EvolveOptions rec;
  rec.guards = GuardPolicy::Record;
  const auto destroyed = diagnose(evolve(testing::from_preset("fig9c"), rec));
  CHECK(destroyed.distortion > 1.0);
  CHECK(destroyed.fidelity < 0.5);

  const auto onset = diagnose(evolve(testing::from_preset("fig8a"), rec));
  const auto resonant = diagnose(evolve(testing::from_preset("fig3a"), rec));
  CHECK(onset.distortion > resonant.distortion);
  CHECK(onset.distortion > 1e-3);
  CHECK(onset.distortion < kUndistortedThreshold);
}

TEST_CASE("decay fit ignores the input amplitude") {
  auto s = testing::small_scenario(4096);
  const auto base = evolve(s);
  for (double scale : {4.0, 3.7}) {
    auto t = s;
    for (auto& v : t.input_pulse.values) v *= scale;
    const auto scaled = evolve(t);
    const auto w = s.profile.storage_window();
    CHECK(rel_err(fit_decay_rate(scaled, w).rate, fit_decay_rate(base, w).rate) < 1e-9);
  }
}

TEST_CASE("diagnose falls back to the whole run without a storage window") {
  auto s = testing::small_scenario(4096);
  s.profile = ControlProfile::constant_theta(std::numbers::pi / 2);
  const auto rep = diagnose(evolve(s));
  CHECK(std::isnan(rep.storage_vg));
  CHECK(rep.alpha1_fit.points == 12);
  CHECK(rep.alpha1_fit.rate == doctest::Approx(1e4).epsilon(1e-6));
}
