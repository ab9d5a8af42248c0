#pragma once

#include <algorithm>

#include "sublex/ambiguity_set.hpp"
#include "sublex/event.hpp"
#include "sublex/test_function.hpp"

namespace sublex {

/// The pair of truncated-limit means (lower, upper) that steering clamps
/// targets into. Always lower <= upper.
struct MeanFunctional {
  double mu_lower = 0.0;
  double mu_upper = 0.0;
};

/// Upper expectation: max over family members of E_theta[f], arity-1 f.
/// quad_tol is the per-member absolute quadrature tolerance.
double upper_expectation(const AmbiguitySet& a, const TestFunction& f,
                         double quad_tol = 1e-9);

/// Lower (conjugate) expectation, implemented literally as
/// -upper_expectation(a, -f) so the conjugacy identity holds bit-exactly.
double lower_expectation(const AmbiguitySet& a, const TestFunction& f,
                         double quad_tol = 1e-9);

/// Upper capacity: max over members of P_theta(A). Exact (CDF sums).
double upper_capacity(const AmbiguitySet& a, const Event& A);

/// Lower capacity, literally 1 - upper_capacity(a, complement(A)).
double lower_capacity(const AmbiguitySet& a, const Event& A);

/// Both capacities bundled as one object over a fixed family.
class CapacityPair {
 public:
  explicit CapacityPair(AmbiguitySet a) : a_(std::move(a)) {}
  double upper(const Event& A) const { return upper_capacity(a_, A); }
  double lower(const Event& A) const { return lower_capacity(a_, A); }
  const AmbiguitySet& family() const { return a_; }

 private:
  AmbiguitySet a_;
};

/// Two-sided truncation (-c) v x ^ c.
constexpr double truncate(double x, double c) {
  return std::max(-c, std::min(x, c));
}

/// Limits of the truncated upper/lower means. Doubles the truncation level
/// c until the integrated-tail bound sum_theta E_theta(|X| - c)^+ falls
/// below tail_tol, then reports (min, max) member means of the truncated
/// variable. Throws NumericError if the schedule exhausts (tails too
/// heavy for the bound to pass).
MeanFunctional truncated_mean_limit(const AmbiguitySet& a,
                                    double tail_tol = 1e-9,
                                    double quad_tol = 1e-10);

}  // namespace sublex
