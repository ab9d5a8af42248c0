#pragma once

#include <vector>

#include "sublex/distribution.hpp"

namespace sublex {

/// Half-open interval [lo, hi) with lo in [-inf, inf) and hi in (-inf, +inf].
struct Interval {
  double lo;
  double hi;
};

/// A Borel event represented as a finite union of disjoint half-open
/// intervals, kept normalized (sorted, merged, non-empty pieces). The
/// algebra is closed under complement, which is what makes the conjugate
/// capacity identity exact.
class Event {
 public:
  Event() = default;  // the empty event

  static Event empty();
  static Event real_line();
  /// [lo, hi). Throws ConfigError unless lo < hi.
  static Event interval(double lo, double hi);
  /// [t, +inf).
  static Event ray_ge(double t);
  /// (-inf, t).
  static Event ray_lt(double t);
  /// Union of arbitrary intervals; overlapping or touching pieces merge.
  static Event union_of(std::vector<Interval> pieces);

  bool is_empty() const { return pieces_.empty(); }
  const std::vector<Interval>& pieces() const { return pieces_; }

  Event complement() const;
  Event united(const Event& other) const;

  /// P(X in event): a finite sum of exact CDF differences, no quadrature.
  double prob_under(const Distribution& d) const;

 private:
  std::vector<Interval> pieces_;
};

}  // namespace sublex
