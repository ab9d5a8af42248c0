#pragma once

#include "sublex/ambiguity_set.hpp"
#include "sublex/test_function.hpp"

namespace sublex {

/// Controls for the tabulated backward induction over continuous members.
struct GridSpec {
  /// Nodes per axis of the stage tables (>= 3; refined to 2n-1 for the
  /// resolution check).
  int nodes_per_axis = 65;
  /// Allowed disagreement between the coarse and refined runs.
  double richardson_tol = 1e-6;
  /// Quadrature tolerance of the innermost stage.
  double quad_tol = 1e-9;
};

/// Independence-respecting (nested) upper expectation of f(X_1, ..., X_d)
/// by backward induction: the innermost stage integrates f directly, each
/// outer stage maximizes the member expectation of the stage below.
///
///  * arity 1 reduces to upper_expectation exactly (same code path);
///  * all-atom families are enumerated exactly, no grids involved;
///  * families with continuous members tabulate stage functions on a
///    per-axis grid (piecewise-linear in the integrated coordinate, with
///    closed-form segment integrals per member kind) and re-run at double
///    resolution; disagreement beyond grid.richardson_tol throws
///    GridResolutionError.
double nested_expectation(const AmbiguitySet& a, const TestFunction& f,
                          const GridSpec& grid = {});

}  // namespace sublex
