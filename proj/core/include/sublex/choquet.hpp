#pragma once

#include "sublex/ambiguity_set.hpp"
#include "sublex/test_function.hpp"

namespace sublex {

struct ChoquetOptions {
  /// Absolute tolerance of the level integrals.
  double tol = 1e-6;
  /// Nodes of the level-set scan grid over the family hull (continuous
  /// members of non-monotone g only). The run is repeated at 2n-1 nodes
  /// as a resolution check.
  int scan_nodes = 2049;
};

struct ChoquetBreakdown {
  double value = 0.0;
  /// Integral of the upper survival function over [0, inf).
  double positive_part = 0.0;
  /// Integral of (upper survival - 1) over (-inf, 0]; non-positive.
  double negative_part = 0.0;
};

/// Choquet integral of g(X) against the upper capacity:
///
///   C[g] = int_0^inf V(g(X) >= t) dt + int_{-inf}^0 [V(g(X) >= t) - 1] dt
///
/// with V the member-wise maximum probability. Level sets of g are exact
/// sums for atom members; for continuous members they are rays located by
/// bisection when g is monotone on the hull, otherwise interval unions
/// recovered from a sign scan with per-crossing bisection. The improper
/// t-integrals run over a doubling segment schedule and stop once the
/// growth-envelope tail bound drops below 1e-12 of the running value;
/// a schedule that never gets there throws NumericError (heavy tails).
ChoquetBreakdown choquet_upper(const AmbiguitySet& a, const TestFunction& g,
                               const ChoquetOptions& opts = {});

}  // namespace sublex
