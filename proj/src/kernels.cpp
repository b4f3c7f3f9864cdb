#include "eitmem/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "eitmem/coefficients.hpp"

namespace eitmem::kernels {

namespace {

inline cplx propagate_one(cplx s, double k, double m, cplx rate0, cplx rate1) {
  return s * m * std::exp(-(rate0 + k * rate1));
}

inline void reconstruct_one(cplx psi, const FieldFactors& f, cplx& e, cplx& sigma, cplx& phi) {
  const cplx b = f.bright_ratio * psi;
  phi = b;
  e = f.cos_theta * psi + f.sin_theta * b;
  sigma = -(f.sin_theta * psi - f.cos_theta * b) * f.inv_sqrt_n;
}

inline cplx direct_sum(const PhysicalParams& params, double k,
                       std::span<const QuadratureNode> nodes) {
  cplx acc{};
  for (const auto& node : nodes) acc += node.weight * exponent_rate_unsplit(params, node.mixing, k);
  return acc;
}

Moments block_moments(std::span<const cplx> v, double z0, double dz, std::size_t lo,
                      std::size_t hi) {
  Moments m;
  for (std::size_t i = lo; i < hi; ++i) {
    const double p = std::norm(v[i]);
    m.sum_sq += p;
    m.sum_z_sq += (z0 + dz * static_cast<double>(i)) * p;
    m.peak = std::max(m.peak, std::abs(v[i]));
  }
  return m;
}

}  // namespace

void propagate(std::span<const cplx> spec0, std::span<const double> k,
               std::span<const double> mask, cplx rate0, cplx rate1, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(spec0.size());
  const bool masked = !mask.empty();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    out[j] = propagate_one(spec0[j], k[j], masked ? mask[j] : 1.0, rate0, rate1);
  }
}

void reconstruct(std::span<const cplx> psi, const FieldFactors& f, std::span<cplx> e,
                 std::span<cplx> sigma, std::span<cplx> phi) {
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) reconstruct_one(psi[j], f, e[j], sigma[j], phi[j]);
}

Moments moments(std::span<const cplx> v, double z0, double dz) {
  const std::size_t n = v.size();
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<Moments> partial(blocks);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    partial[b] = block_moments(v, z0, dz, lo, std::min(n, lo + kReductionBlock));
  }
  Moments total;
  for (const auto& p : partial) {
    total.sum_sq += p.sum_sq;
    total.sum_z_sq += p.sum_z_sq;
    total.peak = std::max(total.peak, p.peak);
  }
  return total;
}

void accumulate_direct_exponents(const PhysicalParams& params, std::span<const double> k,
                                 std::span<const QuadratureNode> nodes, std::span<cplx> inout) {
  const auto n = static_cast<std::ptrdiff_t>(k.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) inout[j] += direct_sum(params, k[j], nodes);
}

namespace serial {

void propagate(std::span<const cplx> spec0, std::span<const double> k,
               std::span<const double> mask, cplx rate0, cplx rate1, std::span<cplx> out) {
  for (std::size_t j = 0; j < spec0.size(); ++j) {
    out[j] = propagate_one(spec0[j], k[j], mask.empty() ? 1.0 : mask[j], rate0, rate1);
  }
}

void reconstruct(std::span<const cplx> psi, const FieldFactors& f, std::span<cplx> e,
                 std::span<cplx> sigma, std::span<cplx> phi) {
  for (std::size_t j = 0; j < psi.size(); ++j) reconstruct_one(psi[j], f, e[j], sigma[j], phi[j]);
}

Moments moments(std::span<const cplx> v, double z0, double dz) {
  Moments total;
  for (std::size_t lo = 0; lo < v.size(); lo += kReductionBlock) {
    const auto p = block_moments(v, z0, dz, lo, std::min(v.size(), lo + kReductionBlock));
    total.sum_sq += p.sum_sq;
    total.sum_z_sq += p.sum_z_sq;
    total.peak = std::max(total.peak, p.peak);
  }
  return total;
}

void accumulate_direct_exponents(const PhysicalParams& params, std::span<const double> k,
                                 std::span<const QuadratureNode> nodes, std::span<cplx> inout) {
  for (std::size_t j = 0; j < k.size(); ++j) inout[j] += direct_sum(params, k[j], nodes);
}

}  // namespace serial

}  // namespace eitmem::kernels
