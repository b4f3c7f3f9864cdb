#include "eitmem/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "eitmem/errors.hpp"

namespace eitmem {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FourierTransform::Plans {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

FourierTransform::FourierTransform(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw Error(ErrorKind::GridMismatch, "transform length must be a power of two");
  }
  std::lock_guard lock(planner_mutex());
  plans_->in = fftw_alloc_complex(n);
  plans_->out = fftw_alloc_complex(n);
  const int len = static_cast<int>(n);
  plans_->fwd = fftw_plan_dft_1d(len, plans_->in, plans_->out, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_dft_1d(len, plans_->in, plans_->out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
  fftw_free(plans_->in);
  fftw_free(plans_->out);
}

namespace {

void run(fftw_plan plan, fftw_complex* in, fftw_complex* out, std::span<const cplx> src,
         std::span<cplx> dst, std::size_t n) {
  if (src.size() != n || dst.size() != n) {
    throw Error(ErrorKind::GridMismatch, "transform input/output length mismatch");
  }
  // std::complex<double> is layout-compatible with fftw_complex.
  std::memcpy(in, src.data(), n * sizeof(cplx));
  fftw_execute(plan);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const auto* res = reinterpret_cast<const cplx*>(out);
  for (std::size_t i = 0; i < n; ++i) dst[i] = res[i] * scale;
}

}  // namespace

void FourierTransform::forward(std::span<const cplx> in, std::span<cplx> out) const {
  run(plans_->fwd, plans_->in, plans_->out, in, out, n_);
}

void FourierTransform::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  run(plans_->bwd, plans_->in, plans_->out, in, out, n_);
}

const FourierTransform& transform_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FourierTransform>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FourierTransform>(n);
  return *slot;
}

Spectrum forward_ft(const ComplexField& field) {
  if (field.values.size() != field.grid.size()) {
    throw Error(ErrorKind::GridMismatch, "field size != grid size");
  }
  Spectrum s{field.grid, std::vector<cplx>(field.size())};
  transform_for(field.size()).forward(field.values, s.values);
  return s;
}

ComplexField inverse_ft(const Spectrum& spectrum) {
  if (spectrum.values.size() != spectrum.grid.size()) {
    throw Error(ErrorKind::GridMismatch, "spectrum size != grid size");
  }
  ComplexField f(spectrum.grid);
  transform_for(spectrum.values.size()).inverse(spectrum.values, f.values);
  return f;
}

}  // namespace eitmem
