#include "sublex/sublinear.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sublex/errors.hpp"

namespace sublex {

double upper_expectation(const AmbiguitySet& a, const TestFunction& f,
                         double quad_tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Distribution& d : a.members()) {
    best = std::max(best, d.expect(f, quad_tol));
  }
  return best;
}

double lower_expectation(const AmbiguitySet& a, const TestFunction& f,
                         double quad_tol) {
  return -upper_expectation(a, f.negated(), quad_tol);
}

double upper_capacity(const AmbiguitySet& a, const Event& A) {
  double best = 0.0;
  for (const Distribution& d : a.members()) {
    best = std::max(best, A.prob_under(d));
  }
  return best;
}

double lower_capacity(const AmbiguitySet& a, const Event& A) {
  return 1.0 - upper_capacity(a, A.complement());
}

MeanFunctional truncated_mean_limit(const AmbiguitySet& a, double tail_tol,
                                    double quad_tol) {
  constexpr int kMaxDoublings = 64;
  double c = 1.0;
  for (int k = 0; k < kMaxDoublings; ++k, c *= 2.0) {
    double bound = 0.0;
    for (const Distribution& d : a.members()) {
      bound += d.expected_excess_abs(c);
    }
    if (bound >= tail_tol) continue;

    // Tails beyond c are provably negligible; the truncated means have
    // stabilized to within the bound.
    const double level = c;
    auto truncated = [level](double x) { return truncate(x, level); };
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Distribution& d : a.members()) {
      const double m = d.expect(truncated, quad_tol);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    return MeanFunctional{lo, hi};
  }
  throw NumericError(
      "truncated mean limit: integrated tail bound stayed above " +
      std::to_string(tail_tol) + " after " + std::to_string(kMaxDoublings) +
      " doublings of the truncation level (tails too heavy)");
}

}  // namespace sublex
