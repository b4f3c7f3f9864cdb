#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace eitmem {

/// Number of equal trapezoid panels covering [a, b] with width at most dt.
inline std::size_t panel_count(double a, double b, double dt) {
  const double n = std::ceil((b - a) / dt - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, n));
}

/// Composite trapezoid rule on [a, b]. The accumulator type follows f's result,
/// so f may return a double, a complex, or any small aggregate with + and *.
template <class F>
auto trapezoid(F&& f, double a, double b, double dt) {
  const std::size_t n = panel_count(a, b, dt);
  const double h = (b - a) / static_cast<double>(n);
  auto sum = f(a) * 0.5;
  for (std::size_t j = 1; j < n; ++j) sum = sum + f(a + h * static_cast<double>(j));
  sum = sum + f(b) * 0.5;
  return sum * h;
}

}  // namespace eitmem
