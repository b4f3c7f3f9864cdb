#include "eitmem/coefficients.hpp"

#include <cmath>

#include "eitmem/errors.hpp"
#include "eitmem/kernels.hpp"
#include "eitmem/quadrature.hpp"
#include "eitmem/spectral.hpp"

namespace eitmem {

namespace {

constexpr cplx I{0.0, 1.0};

// X (tan(theta) theta_dot sin^2 - (i Dp + gamma_bc) sin^4), the common A0 numerator.
cplx a0_numerator(const PhysicalParams& p, const MixingState& m, cplx x) {
  const cplx ground(p.gamma_bc, p.delta_p);
  return x * (m.tan_theta_dot * m.sin2 - ground * m.sin2 * m.sin2);
}

}  // namespace

cplx detuning_product(const PhysicalParams& params) {
  const cplx optical(params.gamma_ba, params.delta + params.delta_p);
  const cplx ground(params.gamma_bc, params.delta_p);
  return optical * ground;
}

std::pair<cplx, cplx> a0_b0_full(const PhysicalParams& params, const MixingState& m) {
  const cplx x = detuning_product(params);
  const cplx den = params.g2n() + x * m.sin2;
  if (std::abs(den) < 1e-6 * params.g2n()) {
    throw Error(ErrorKind::DegenerateDenominator,
                "|g^2 N + X sin^2(theta)| < 1e-6 g^2 N; high-density condition badly violated");
  }
  const cplx a0 = a0_numerator(params, m, x) / den;
  const cplx b0 = x * m.sin2 * m.sin2 / den;
  return {a0, b0};
}

std::pair<cplx, cplx> a0_b0_full(const PhysicalParams& params, double theta, double theta_dot) {
  return a0_b0_full(params, MixingState::from_angle(theta, theta_dot));
}

std::pair<cplx, cplx> a0_b0_reduced(const PhysicalParams& params, const MixingState& m) {
  const cplx x = detuning_product(params);
  const double g2n = params.g2n();
  return {a0_numerator(params, m, x) / g2n, x * m.sin2 * m.sin2 / g2n};
}

CoefficientSet coefficients_reduced(const PhysicalParams& params, const MixingState& m) {
  const double d_sum = params.delta + params.delta_p;
  const double dp = params.delta_p;
  const double gbc = params.gamma_bc;
  const double gba = params.gamma_ba;
  const double g2n = params.g2n();
  const double s2 = m.sin2;

  // X = q + i p
  const double p = d_sum * gbc + dp * gba;
  const double q = gbc * gba - dp * d_sum;
  const double rot = m.tan_theta_dot - gbc * s2;

  CoefficientSet c;
  c.alpha1 = gbc * s2 + (s2 / g2n) * (q * rot + p * (dp * s2));
  c.alpha2 = -params.c_light * (p * s2 * s2 / g2n);
  c.beta = dp * s2 + (s2 / g2n) * (p * rot - q * (dp * s2));
  c.v_g = params.c_light * (m.cos2 + q * s2 * s2 / g2n);

  const auto [a0, b0] = a0_b0_reduced(params, m);
  c.a0 = a0;
  c.b0 = b0;
  const auto regime = check_high_density(params);
  c.density_ratio = regime.ratio;
  c.regime_ok = regime.ok;
  return c;
}

CoefficientSet coefficients_reduced(const PhysicalParams& params, double theta,
                                    double theta_dot) {
  return coefficients_reduced(params, MixingState::from_angle(theta, theta_dot));
}

cplx exponent_rate_unsplit(const PhysicalParams& params, const MixingState& m, double k) {
  const auto [a0, b0] = a0_b0_reduced(params, m);
  const cplx ground(params.gamma_bc, params.delta_p);
  return ground * m.sin2 + a0 + I * k * params.c_light * (m.cos2 + b0);
}

cplx exponent_rate_split(const CoefficientSet& c, double k) {
  return cplx(c.alpha1 + k * c.alpha2, c.beta + k * c.v_g);
}

double vg_min(const PhysicalParams& params) {
  return params.c_light * (params.gamma_bc * params.gamma_ba / params.g2n());
}

double alpha1_resonant(const PhysicalParams& params, const MixingState& m, Alpha1Tier tier) {
  const double gbc = params.gamma_bc;
  const double ratio = gbc * params.gamma_ba / params.g2n();
  switch (tier) {
    case Alpha1Tier::Full:
      return gbc * m.sin2 + ratio * (m.tan_theta_dot - gbc * m.sin2) * m.sin2;
    case Alpha1Tier::HighDensity:
      return (gbc + ratio * m.tan_theta_dot) * m.sin2;
    case Alpha1Tier::SlowLight:
      return gbc + ratio * m.tan_theta_dot;
    case Alpha1Tier::Constant:
      return gbc;
  }
  return gbc;
}

double alpha1_resonant(const PhysicalParams& params, double theta, double theta_dot,
                       Alpha1Tier tier) {
  return alpha1_resonant(params, MixingState::from_angle(theta, theta_dot), tier);
}

ComplexField predict_output(const ComplexField& input, const PhysicalParams& params,
                            const ControlProfile& profile, double t_out, OutputModel model,
                            double dt, Alpha1Tier tier) {
  if (!params.resonant()) {
    throw ValidationError("predict_output models resonant transport (delta = delta_p = 0)");
  }
  if (!(t_out >= 0.0)) throw ValidationError("t_out >= 0");

  struct Pair {
    double vg, a1;
    Pair operator+(const Pair& o) const { return {vg + o.vg, a1 + o.a1}; }
    Pair operator*(double s) const { return {vg * s, a1 * s}; }
  };
  Pair integral{0.0, 0.0};
  if (t_out > 0.0) {
    integral = trapezoid(
        [&](double t) {
          const MixingState m = mixing_state(profile, params, t);
          const double vg = params.c_light * (m.cos2 + params.gamma_bc * params.gamma_ba *
                                                           (m.sin2 * m.sin2 / params.g2n()));
          return Pair{vg, alpha1_resonant(params, m, tier)};
        },
        0.0, t_out, dt);
  }
  const double shift = integral.vg;
  const double decay = model == OutputModel::GammaBcDecay ? params.gamma_bc * t_out : integral.a1;

  // Centroid and rms width of |input|^2 decide whether the shifted pulse still fits.
  const auto& grid = input.grid;
  const auto mom = kernels::serial::moments(input.values, grid.z_min(), grid.dz());
  if (mom.sum_sq > 0.0) {
    const double zc = mom.sum_z_sq / mom.sum_sq;
    double var = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
      const double d = grid.z(i) - zc;
      var += d * d * std::norm(input.values[i]);
    }
    const double rms = std::sqrt(var / mom.sum_sq);
    const double z_out = zc + shift;
    if (z_out - 3.0 * rms < grid.z_min() || z_out + 3.0 * rms > grid.z_max()) {
      throw Error(ErrorKind::OutOfCell, "predicted output centroid " + std::to_string(z_out) +
                                            " m leaves the grid");
    }
  }

  Spectrum spec = forward_ft(input);
  std::vector<cplx> shifted(spec.values.size());
  kernels::serial::propagate(spec.values, grid.k_values(), {}, cplx(decay, 0.0),
                             cplx(0.0, shift), shifted);
  return inverse_ft(Spectrum{grid, std::move(shifted)});
}

DetuningLimits detuning_limits(const PhysicalParams& params, double pulse_length,
                               double storage_time) {
  const double scale = 0.01 * params.g2n() * pulse_length / (params.c_light * storage_time);
  DetuningLimits d;
  d.delta_p_max = scale / params.gamma_ba;
  d.delta_max = scale / params.gamma_bc;
  d.bw_diff_max = d.delta_p_max;
  d.bw_max = d.delta_max;
  return d;
}

}  // namespace eitmem
