#pragma once

#include <utility>

#include "eitmem/core_model.hpp"

namespace eitmem {

/// Instantaneous transport coefficients of the dark-state polariton. In k-space
/// each mode evolves as exp(-int [alpha1 + i beta + k alpha2 + i k v_g] dt).
struct CoefficientSet {
  double alpha1 = 0.0;  // 1/s, k-independent decay
  double alpha2 = 0.0;  // m/s, k-dependent gain (<0) or loss (>0)
  double beta = 0.0;    // rad/s, global phase rate
  double v_g = 0.0;     // m/s
  cplx a0{};            // reduced A0 (1/s)
  cplx b0{};            // reduced B0 (dimensionless)
  double density_ratio = 0.0;
  bool regime_ok = true;  // high-density ratio >= 10
};

struct DetuningLimits {
  double delta_p_max = 0.0;  // two-photon detuning limit, rad/s
  double delta_max = 0.0;    // one-photon detuning limit, rad/s
  double bw_diff_max = 0.0;  // bound on |BW_c - BW_p| and |nu_0c - nu_0p|
  double bw_max = 0.0;       // bound on each laser bandwidth
};

/// (i(D + Dp) + gamma_ba)(i Dp + gamma_bc), the product that every
/// non-ideal correction carries.
cplx detuning_product(const PhysicalParams& params);

/// A0 and B0 with the exact denominator g^2 N + X sin^2(theta).
/// Throws DegenerateDenominator when |denominator| < 1e-6 g^2 N.
std::pair<cplx, cplx> a0_b0_full(const PhysicalParams& params, double theta, double theta_dot);
std::pair<cplx, cplx> a0_b0_full(const PhysicalParams& params, const MixingState& m);

/// A0 and B0 with the denominator reduced to g^2 N, in complex form.
std::pair<cplx, cplx> a0_b0_reduced(const PhysicalParams& params, const MixingState& m);

/// alpha1, alpha2, beta, v_g from the explicit real/imaginary split. A
/// violated high-density condition is flagged in the result, not thrown.
CoefficientSet coefficients_reduced(const PhysicalParams& params, double theta, double theta_dot);
CoefficientSet coefficients_reduced(const PhysicalParams& params, const MixingState& m);

/// Unsplit k-space rate: (i Dp + gamma_bc) sin^2 + A0 + i k c (cos^2 + B0),
/// with the reduced A0, B0.
cplx exponent_rate_unsplit(const PhysicalParams& params, const MixingState& m, double k);
/// Split rate alpha1 + i beta + k alpha2 + i k v_g.
cplx exponent_rate_split(const CoefficientSet& c, double k);

/// Residual group velocity with the control fully off, on resonance.
double vg_min(const PhysicalParams& params);

enum class Alpha1Tier { Full, HighDensity, SlowLight, Constant };

/// Resonant decay rate at one of the successive approximation tiers.
double alpha1_resonant(const PhysicalParams& params, double theta, double theta_dot,
                       Alpha1Tier tier);
double alpha1_resonant(const PhysicalParams& params, const MixingState& m, Alpha1Tier tier);

enum class OutputModel { GammaBcDecay, IntegratedDecay };

/// Analytic resonant output: the input shifted by int_0^t_out v_g dt and
/// scaled by exp(-gamma_bc t_out) (GammaBcDecay) or exp(-int alpha1 dt) (IntegratedDecay,
/// alpha1 at `tier`). Detunings in `params` must be zero. The shift is applied
/// spectrally, so it is exact for band-limited input.
/// Throws OutOfCell if the displaced pulse would leave the grid.
ComplexField predict_output(const ComplexField& input, const PhysicalParams& params,
                            const ControlProfile& profile, double t_out, OutputModel model,
                            double dt = 1.0e-7, Alpha1Tier tier = Alpha1Tier::HighDensity);

/// Distortion-free detuning and laser-bandwidth limits for pulse length L_p
/// and storage time T0 (0.01 g^2 N L_p / (c gamma T0)).
DetuningLimits detuning_limits(const PhysicalParams& params, double pulse_length,
                               double storage_time);

}  // namespace eitmem
