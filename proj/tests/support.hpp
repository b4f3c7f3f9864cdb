#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "eitmem/core_model.hpp"
#include "eitmem/scenario_io.hpp"

namespace testing {

using eitmem::cplx;

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline double rel_err(cplx a, cplx b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// ||a - b|| / ||b|| over two sample vectors.
inline double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng());
}

inline double log_uniform(double a, double b) {
  return std::exp(uniform(std::log(a), std::log(b)));
}

/// The reference scenario with a few fields swapped.
inline eitmem::Scenario scenario_with(double gamma_ba, double gamma_bc, double delta = 0.0,
                                      double delta_p = 0.0) {
  auto s = eitmem::reference_scenario();
  s.params.gamma_ba = gamma_ba;
  s.params.gamma_bc = gamma_bc;
  s.params.delta = delta;
  s.params.delta_p = delta_p;
  return s;
}

/// A lighter scenario for tests that do not care about high-k resolution.
inline eitmem::Scenario small_scenario(std::size_t n = 2048) {
  auto s = eitmem::reference_scenario();
  s.grid = eitmem::SpatialGrid(-5.0e-3, 15.0e-3, n);
  s.input_pulse = eitmem::gaussian_pulse(s.grid, eitmem::GaussianPulse{});
  return s;
}

inline eitmem::Scenario from_preset(const char* name) {
  return eitmem::to_scenario(eitmem::find_preset(name).config);
}

}  // namespace testing
