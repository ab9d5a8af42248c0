#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sublex {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

/// Adaptive Gauss-Kronrod (G7, K15) integration of f over [lo, hi].
/// Panels are bisected worst-error-first until the summed error estimate
/// drops below abs_tol. Throws QuadratureError (carrying the achieved
/// estimate) if max_panels subdivisions are not enough.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double abs_tol,
                           std::size_t max_panels = 4096);

/// Same, but the initial panel set is seeded from consecutive breakpoint
/// pairs. Useful when the integrand has known kinks or scale changes.
QuadratureResult integrate_segmented(const std::function<double(double)>& f,
                                     const std::vector<double>& breakpoints,
                                     double abs_tol,
                                     std::size_t max_panels = 4096);

}  // namespace sublex
