#include "eitmem/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eitmem/kernels.hpp"
#include "eitmem/quadrature.hpp"

namespace eitmem {

namespace {

void enforce_regime(const HighDensityReport& regime, bool strict) {
  if (strict && !regime.ok) {
    std::ostringstream os;
    os << "high-density ratio " << regime.ratio << " < " << kMuchGreater;
    throw Error(ErrorKind::RegimeViolation, os.str());
  }
}

kernels::FieldFactors field_factors(const PhysicalParams& params, const MixingState& m) {
  kernels::FieldFactors f;
  f.cos_theta = std::sqrt(m.cos2);
  f.sin_theta = std::sqrt(m.sin2);
  f.inv_sqrt_n = 1.0 / std::sqrt(params.n_atoms);
  f.bright_ratio = bright_ratio(params, m);
  return f;
}

std::vector<kernels::QuadratureNode> quadrature_nodes(const PhysicalParams& params,
                                                      const ControlProfile& profile, double a,
                                                      double b, double dt) {
  const std::size_t n = panel_count(a, b, dt);
  const double h = (b - a) / static_cast<double>(n);
  std::vector<kernels::QuadratureNode> nodes(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = j == n ? b : a + h * static_cast<double>(j);
    nodes[j].mixing = mixing_state(profile, params, t);
    nodes[j].weight = (j == 0 || j == n) ? 0.5 * h : h;
  }
  return nodes;
}

// Shared snapshot bookkeeping for evolve and evolve_reference.
class SnapshotBuilder {
 public:
  SnapshotBuilder(const Scenario& s, const EvolveOptions& o, Trajectory& traj, double spec0_peak,
                  bool parallel)
      : scenario_(s), options_(o), traj_(traj), spec0_peak_(spec0_peak), parallel_(parallel) {}

  void add(double t, const std::vector<cplx>& spec_t, const CoefficientIntegrals& integrals) {
    const auto& grid = scenario_.grid;
    const auto spec_mom = parallel_ ? kernels::moments(spec_t, 0.0, 0.0)
                                    : kernels::serial::moments(spec_t, 0.0, 0.0);
    if (spec_mom.peak > options_.overflow_factor * spec0_peak_) {
      std::ostringstream os;
      os << "max |Psi(k,t)| grew by " << spec_mom.peak / spec0_peak_ << " at t = " << t
         << " s (limit " << options_.overflow_factor << ")";
      trip(ErrorKind::OverflowGuard, t, os.str());
    }

    Snapshot snap;
    snap.t = t;
    snap.integrals = integrals;
    snap.psi = ComplexField(grid);
    transform_for(grid.size()).inverse(spec_t, snap.psi.values);

    const auto mom = parallel_ ? kernels::moments(snap.psi.values, grid.z_min(), grid.dz())
                               : kernels::serial::moments(snap.psi.values, grid.z_min(), grid.dz());
    snap.psi_peak = mom.peak;
    snap.psi_l2 = std::sqrt(mom.sum_sq * grid.dz());
    snap.psi_centroid = mom.sum_sq > 0.0 ? mom.sum_z_sq / mom.sum_sq : 0.0;
    running_peak_ = std::max(running_peak_, mom.peak);
    const double edge =
        std::max(std::abs(snap.psi.values.front()), std::abs(snap.psi.values.back()));
    if (edge > options_.wraparound_fraction * running_peak_) {
      std::ostringstream os;
      os << "boundary amplitude " << edge << " exceeds " << options_.wraparound_fraction
         << " x running peak " << running_peak_ << " at t = " << t << " s";
      trip(ErrorKind::WraparoundDetected, t, os.str());
    }

    snap.mixing = mixing_state(scenario_.profile, scenario_.params, t);
    snap.coefficients = coefficients_reduced(scenario_.params, snap.mixing);
    snap.e_field = ComplexField(grid);
    snap.sigma_bc = ComplexField(grid);
    snap.phi = ComplexField(grid);
    const auto factors = field_factors(scenario_.params, snap.mixing);
    if (parallel_) {
      kernels::reconstruct(snap.psi.values, factors, snap.e_field.values, snap.sigma_bc.values,
                           snap.phi.values);
    } else {
      kernels::serial::reconstruct(snap.psi.values, factors, snap.e_field.values,
                                   snap.sigma_bc.values, snap.phi.values);
    }
    traj_.snapshots.push_back(std::move(snap));
  }

 private:
  void trip(ErrorKind kind, double t, const std::string& msg) {
    if (options_.guards == GuardPolicy::Throw) throw Error(kind, msg);
    if (!traj_.guard) traj_.guard = GuardEvent{kind, t, msg};
  }

  const Scenario& scenario_;
  const EvolveOptions& options_;
  Trajectory& traj_;
  double spec0_peak_;
  bool parallel_;
  double running_peak_ = 0.0;
};

struct Prepared {
  std::vector<cplx> spec0;
  std::vector<double> mask;
  double spec0_peak = 0.0;
};

Prepared prepare(const Scenario& scenario, const EvolveOptions& options, Trajectory& traj) {
  scenario.validate();
  traj.scenario = scenario;
  traj.regime = check_high_density(scenario.params);
  enforce_regime(traj.regime, options.strict_regime);

  Prepared p;
  p.spec0 = forward_ft(scenario.input_pulse).values;
  if (scenario.spectral_filter) p.mask = low_pass_mask(scenario.grid);
  for (const auto& v : p.spec0) p.spec0_peak = std::max(p.spec0_peak, std::abs(v));
  return p;
}

}  // namespace

CoefficientIntegrals coefficient_integrals(const PhysicalParams& params,
                                           const ControlProfile& profile, double t_a,
                                           double t_b, double dt) {
  if (!(t_b > t_a)) return {};
  return trapezoid(
      [&](double t) {
        const auto c = coefficients_reduced(params, mixing_state(profile, params, t));
        return CoefficientIntegrals{c.alpha1, c.beta, c.alpha2, c.v_g};
      },
      t_a, t_b, dt);
}

cplx exponent_integral(const PhysicalParams& params, const ControlProfile& profile, double k,
                       double t_a, double t_b, double dt, bool strict_regime) {
  if (!(t_a < t_b)) throw ValidationError("exponent_integral requires t_a < t_b");
  enforce_regime(check_high_density(params), strict_regime);
  return trapezoid(
      [&](double t) {
        return exponent_rate_split(coefficients_reduced(params, mixing_state(profile, params, t)),
                                   k);
      },
      t_a, t_b, dt);
}

cplx bright_ratio(const PhysicalParams& params, const MixingState& m) {
  const cplx x = detuning_product(params);
  const cplx den = check_high_density(params).ok ? cplx(params.g2n(), 0.0)
                                                 : params.g2n() + x * m.sin2;
  return x * (m.tan_theta * m.sin2) / den;
}

std::tuple<ComplexField, ComplexField, ComplexField> reconstruct_fields(
    const ComplexField& psi, const PhysicalParams& params, const MixingState& m) {
  ComplexField e(psi.grid), sigma(psi.grid), phi(psi.grid);
  kernels::reconstruct(psi.values, field_factors(params, m), e.values, sigma.values, phi.values);
  return {std::move(e), std::move(sigma), std::move(phi)};
}

std::tuple<ComplexField, ComplexField, ComplexField> reconstruct_fields(
    const ComplexField& psi, const PhysicalParams& params, double theta, double theta_dot) {
  return reconstruct_fields(psi, params, MixingState::from_angle(theta, theta_dot));
}

std::vector<double> low_pass_mask(const SpatialGrid& grid) {
  const double cut = 2.0 / 3.0 * grid.k_max();
  std::vector<double> mask(grid.size());
  const auto& k = grid.k_values();
  for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = std::abs(k[j]) <= cut ? 1.0 : 0.0;
  return mask;
}

Trajectory evolve(const Scenario& scenario, const EvolveOptions& options) {
  Trajectory traj;
  const Prepared prep = prepare(scenario, options, traj);
  const auto times = scenario.snapshot_times();
  traj.snapshots.reserve(times.size());

  SnapshotBuilder builder(scenario, options, traj, prep.spec0_peak, true);
  std::vector<cplx> spec_t(prep.spec0.size());
  CoefficientIntegrals acc;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) {
      acc = acc + coefficient_integrals(scenario.params, scenario.profile, times[i - 1], times[i],
                                        scenario.dt);
    }
    kernels::propagate(prep.spec0, scenario.grid.k_values(), prep.mask, acc.rate0(), acc.rate1(),
                       spec_t);
    builder.add(times[i], spec_t, acc);
  }
  return traj;
}

Trajectory evolve_reference(const Scenario& scenario, const EvolveOptions& options) {
  Trajectory traj;
  const Prepared prep = prepare(scenario, options, traj);
  const auto times = scenario.snapshot_times();
  const auto& k = scenario.grid.k_values();
  const std::size_t n = k.size();

  SnapshotBuilder builder(scenario, options, traj, prep.spec0_peak, false);
  std::vector<cplx> exponent(n, cplx{});
  std::vector<cplx> spec_t(n);
  CoefficientIntegrals acc;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) {
      const auto nodes =
          quadrature_nodes(scenario.params, scenario.profile, times[i - 1], times[i], scenario.dt);
      kernels::serial::accumulate_direct_exponents(scenario.params, k, nodes, exponent);
      acc = acc + coefficient_integrals(scenario.params, scenario.profile, times[i - 1], times[i],
                                        scenario.dt);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double m = prep.mask.empty() ? 1.0 : prep.mask[j];
      spec_t[j] = prep.spec0[j] * m * std::exp(-exponent[j]);
    }
    builder.add(times[i], spec_t, acc);
  }
  return traj;
}

}  // namespace eitmem
