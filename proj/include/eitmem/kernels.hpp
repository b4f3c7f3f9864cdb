#pragma once

// Data-parallel inner loops of the propagator. Each kernel has an OpenMP
// version (namespace kernels) and a plain serial version (kernels::serial)
// that is kept as the reference for tests and the benchmark.
//
// Pointwise kernels produce bit-identical results in both versions. The
// reductions in `moments` sum fixed-size blocks and combine them in order, so
// the OpenMP result does not depend on the thread count.

#include <span>

#include "eitmem/core_model.hpp"

namespace eitmem::kernels {

struct Moments {
  double sum_sq = 0.0;    // sum |v|^2
  double sum_z_sq = 0.0;  // sum z |v|^2
  double peak = 0.0;      // max |v|
};

/// Pointwise factors that turn the polariton into field, coherence and bright state.
struct FieldFactors {
  double cos_theta = 1.0;
  double sin_theta = 0.0;
  double inv_sqrt_n = 1.0;
  cplx bright_ratio{};  // Phi / Psi
};

/// A time node of the direct per-k quadrature: mixing state and trapezoid weight.
struct QuadratureNode {
  MixingState mixing;
  double weight = 0.0;
};

inline constexpr std::size_t kReductionBlock = 1024;

/// out[j] = spec0[j] * mask[j] * exp(-(rate0 + k[j] rate1)); an empty mask means 1.
void propagate(std::span<const cplx> spec0, std::span<const double> k,
               std::span<const double> mask, cplx rate0, cplx rate1, std::span<cplx> out);

/// e = cos psi + sin phi, sigma = -(sin psi - cos phi)/sqrt(N), phi = ratio psi.
void reconstruct(std::span<const cplx> psi, const FieldFactors& f, std::span<cplx> e,
                 std::span<cplx> sigma, std::span<cplx> phi);

Moments moments(std::span<const cplx> v, double z0, double dz);

/// inout[j] += sum_n weight_n * rate_unsplit(mixing_n, k[j]), one independent sum per k.
void accumulate_direct_exponents(const PhysicalParams& params, std::span<const double> k,
                                 std::span<const QuadratureNode> nodes, std::span<cplx> inout);

namespace serial {

void propagate(std::span<const cplx> spec0, std::span<const double> k,
               std::span<const double> mask, cplx rate0, cplx rate1, std::span<cplx> out);
void reconstruct(std::span<const cplx> psi, const FieldFactors& f, std::span<cplx> e,
                 std::span<cplx> sigma, std::span<cplx> phi);
Moments moments(std::span<const cplx> v, double z0, double dz);
void accumulate_direct_exponents(const PhysicalParams& params, std::span<const double> k,
                                 std::span<const QuadratureNode> nodes, std::span<cplx> inout);

}  // namespace serial

}  // namespace eitmem::kernels
