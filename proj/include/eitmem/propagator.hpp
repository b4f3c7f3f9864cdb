#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "eitmem/coefficients.hpp"
#include "eitmem/core_model.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/spectral.hpp"

namespace eitmem {

/// Running time integrals of the split coefficients from t = 0.
struct CoefficientIntegrals {
  double alpha1 = 0.0;
  double beta = 0.0;
  double alpha2 = 0.0;
  double v_g = 0.0;

  /// Rates entering exp(-(rate0 + k rate1)).
  cplx rate0() const { return {alpha1, beta}; }
  cplx rate1() const { return {alpha2, v_g}; }

  CoefficientIntegrals operator+(const CoefficientIntegrals& o) const {
    return {alpha1 + o.alpha1, beta + o.beta, alpha2 + o.alpha2, v_g + o.v_g};
  }
  CoefficientIntegrals operator*(double s) const {
    return {alpha1 * s, beta * s, alpha2 * s, v_g * s};
  }
};

struct Snapshot {
  double t = 0.0;
  ComplexField psi;       // dark-state polariton (information pulse)
  ComplexField e_field;   // probe envelope
  ComplexField sigma_bc;  // ground-state coherence
  ComplexField phi;       // bright state
  MixingState mixing;
  CoefficientSet coefficients;
  CoefficientIntegrals integrals;
  double psi_peak = 0.0;
  double psi_l2 = 0.0;
  double psi_centroid = 0.0;
};

struct GuardEvent {
  ErrorKind kind = ErrorKind::OverflowGuard;
  double t = 0.0;
  std::string message;
};

struct Trajectory {
  Scenario scenario;
  std::vector<Snapshot> snapshots;
  HighDensityReport regime;
  std::optional<GuardEvent> guard;  // first guard that tripped (GuardPolicy::Record)
};

enum class GuardPolicy { Throw, Record };

struct EvolveOptions {
  GuardPolicy guards = GuardPolicy::Throw;
  bool strict_regime = false;             // throw RegimeViolation instead of flagging it
  double wraparound_fraction = 1.0e-3;    // edge amplitude / running peak
  double overflow_factor = 1.0e12;        // max |Psi(k,t)| / max |Psi(k,0)|
};

/// int_{t_a}^{t_b} [alpha1 + i beta + k alpha2 + i k v_g] dt by the trapezoid
/// rule with panels no wider than dt.
cplx exponent_integral(const PhysicalParams& params, const ControlProfile& profile, double k,
                       double t_a, double t_b, double dt, bool strict_regime = false);

/// Split coefficient integrals over [t_a, t_b], same quadrature as exponent_integral.
CoefficientIntegrals coefficient_integrals(const PhysicalParams& params,
                                           const ControlProfile& profile, double t_a,
                                           double t_b, double dt);

/// Probe field, coherence and bright state from the polariton at one instant.
/// Returned in that order: (E, sigma_bc, Phi).
std::tuple<ComplexField, ComplexField, ComplexField> reconstruct_fields(
    const ComplexField& psi, const PhysicalParams& params, double theta, double theta_dot);
std::tuple<ComplexField, ComplexField, ComplexField> reconstruct_fields(
    const ComplexField& psi, const PhysicalParams& params, const MixingState& m);

/// Phi / Psi for the adiabatic bright state.
cplx bright_ratio(const PhysicalParams& params, const MixingState& m);

/// Exact k-space evolution of the scenario's input pulse, sampled at the
/// scenario's snapshot times. Uses the OpenMP kernels and the split exponent.
Trajectory evolve(const Scenario& scenario, const EvolveOptions& options = {});

/// Serial reference: integrates the unsplit rate separately for every k and
/// uses only the serial kernels. Slow; kept for verification and benchmarking.
Trajectory evolve_reference(const Scenario& scenario, const EvolveOptions& options = {});

/// Mask used by the optional spectral filter: 1 for |k| <= 2/3 k_max, else 0.
std::vector<double> low_pass_mask(const SpatialGrid& grid);

}  // namespace eitmem
