#pragma once

#include <memory>
#include <span>
#include <vector>

#include "eitmem/core_model.hpp"

namespace eitmem {

/// k-space amplitudes in discrete-Fourier order (see SpatialGrid::k_values).
struct Spectrum {
  SpatialGrid grid;
  std::vector<cplx> values;
};

/// Unitary discrete Fourier transform pair of a fixed length.
///
/// forward: X_j = n^{-1/2} sum_m x_m exp(-2 pi i j m / n); inverse is its adjoint.
/// Each instance owns its plans and aligned work buffers, so results are
/// bit-reproducible; one instance must not be used from two threads at once.
class FourierTransform {
 public:
  explicit FourierTransform(std::size_t n);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  std::size_t size() const { return n_; }
  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

/// Per-thread cached transform for length n.
const FourierTransform& transform_for(std::size_t n);

Spectrum forward_ft(const ComplexField& field);
ComplexField inverse_ft(const Spectrum& spectrum);

}  // namespace eitmem
