#include "sublex/choquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sublex/errors.hpp"
#include "sublex/event.hpp"
#include "sublex/quadrature.hpp"

namespace sublex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailCut = 1e-12;  // relative tail bound that ends a side
constexpr int kMaxSegments = 60;    // doubling segments per side

// ---------------------------------------------------------------------------
// Level-set evaluation of the upper survival function
//   U(t) = max over members of P(g(X) >= t).
// Atom members are summed exactly. Continuous members get the level set
// {g >= t} as an Event: a single ray found by bisection when g is monotone
// on the scan grid, otherwise an interval union recovered from the grid
// sign pattern with one bisection per crossing.
// ---------------------------------------------------------------------------
class LevelSets {
 public:
  LevelSets(const AmbiguitySet& a, const TestFunction& g, int scan_nodes)
      : a_(a), g_(g) {
    const auto [lo, hi] = a.hull();
    nodes_.resize(scan_nodes);
    gvals_.resize(scan_nodes);
    for (int j = 0; j < scan_nodes; ++j) {
      nodes_[j] = lo + (hi - lo) * static_cast<double>(j) / (scan_nodes - 1);
      gvals_[j] = g(nodes_[j]);
    }
    bool nondec = true, noninc = true;
    for (int j = 0; j + 1 < scan_nodes; ++j) {
      if (gvals_[j + 1] < gvals_[j]) nondec = false;
      if (gvals_[j + 1] > gvals_[j]) noninc = false;
    }
    route_ = nondec ? Route::kNonDecreasing
                    : (noninc ? Route::kNonIncreasing : Route::kGeneral);
  }

  double upper_survival(double t) const {
    double best = 0.0;
    bool event_built = false;
    Event level;
    for (const Distribution& d : a_.members()) {
      double p;
      if (d.kind() == Distribution::Kind::kAtoms) {
        p = 0.0;
        for (const Atom& at : *d.atom_points()) {
          if (g_(at.point) >= t) p += at.weight;
        }
      } else {
        if (!event_built) {
          level = level_event(t);
          event_built = true;
        }
        p = level.prob_under(d);
      }
      best = std::max(best, p);
    }
    return best;
  }

 private:
  enum class Route { kNonDecreasing, kNonIncreasing, kGeneral };

  // Bisect the boundary of {g >= t} inside [xa, xb], where `above` holds at
  // exactly one endpoint. Returns a point within ~1 ulp of the boundary.
  double bisect_crossing(double xa, double xb, double t) const {
    bool above_a = gvals_at(xa) >= t;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (xa + xb);
      if (mid <= xa || mid >= xb) break;
      if ((g_(mid) >= t) == above_a) {
        xa = mid;
      } else {
        xb = mid;
      }
    }
    return 0.5 * (xa + xb);
  }

  double gvals_at(double x) const { return g_(x); }

  Event level_event(double t) const {
    const int n = static_cast<int>(nodes_.size());
    switch (route_) {
      case Route::kNonDecreasing: {
        if (gvals_[0] >= t) return Event::real_line();
        if (gvals_[n - 1] < t) return Event::empty();
        int j = 1;
        while (gvals_[j] < t) ++j;
        return Event::ray_ge(bisect_crossing(nodes_[j - 1], nodes_[j], t));
      }
      case Route::kNonIncreasing: {
        if (gvals_[n - 1] >= t) return Event::real_line();
        if (gvals_[0] < t) return Event::empty();
        int j = 1;
        while (gvals_[j] >= t) ++j;
        return Event::ray_lt(bisect_crossing(nodes_[j - 1], nodes_[j], t));
      }
      case Route::kGeneral: {
        std::vector<Interval> pieces;
        bool open = gvals_[0] >= t;
        double start = -kInf;
        for (int j = 1; j < n; ++j) {
          const bool above = gvals_[j] >= t;
          if (above == open) continue;
          const double x = bisect_crossing(nodes_[j - 1], nodes_[j], t);
          if (open) {
            pieces.push_back(Interval{start, x});
          } else {
            start = x;
          }
          open = above;
        }
        if (open) pieces.push_back(Interval{start, kInf});
        return Event::union_of(std::move(pieces));
      }
    }
    return Event::empty();
  }

  const AmbiguitySet& a_;
  const TestFunction& g_;
  std::vector<double> nodes_;
  std::vector<double> gvals_;
  Route route_;
};

// ---------------------------------------------------------------------------
// Growth-envelope tail bounds. From the declared bound
//   |g(x) - g(0)| <= C (1 + |x|^m) |x|
// the level set {g >= t} sits inside {|x| >= r} with g(0) + C (1+r^m) r = t,
// and {g < t} inside {|x| >= r} with g(0) - C (1+r^m) r = t. Substituting
// t = envelope(r) turns the leftover level integral into
//   int P(|X| >= r) * C (1 + (m+1) r^m) dr,
// which every member kind bounds in a short quadrature over its effective
// support.
// ---------------------------------------------------------------------------

// Smallest r >= 0 with C (1 + r^m) r >= spread; +inf if unreachable (C = 0).
double envelope_radius(double growth_c, int growth_m, double spread) {
  if (spread <= 0.0) return 0.0;
  if (growth_c <= 0.0) return kInf;
  auto env = [&](double r) {
    return growth_c * (1.0 + std::pow(r, growth_m)) * r;
  };
  double hi = 1.0;
  int guard = 0;
  while (env(hi) < spread) {
    hi *= 2.0;
    if (++guard > 400) return kInf;
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (env(mid) >= spread ? hi : lo) = mid;
  }
  return hi;
}

// int_{r_from}^{r_max} P(|X| >= r) C (1 + (m+1) r^m) dr for one member;
// +inf when it cannot be certified.
double member_growth_tail(const Distribution& d, double r_from, double growth_c,
                          int growth_m) {
  if (r_from == kInf || growth_c <= 0.0) return 0.0;
  double r_max;
  if (d.kind() == Distribution::Kind::kGaussian) {
    r_max = std::abs(d.gaussian_mean()) + 40.0 * d.gaussian_sd();
  } else {
    const auto h = d.integration_hull();
    r_max = std::max(std::abs(h.first), std::abs(h.second));
  }
  if (r_from >= r_max) return 0.0;
  const Distribution refl = d.reflected();
  auto integrand = [&](double r) {
    return (d.tail(r) + refl.tail(r)) * growth_c *
           (1.0 + (growth_m + 1) * std::pow(r, growth_m));
  };
  try {
    const auto q = integrate(integrand, r_from, r_max, 1e-14, 512);
    return q.value + q.error_estimate;
  } catch (const QuadratureError&) {
    return kInf;
  }
}

// Bound on int_T^inf U(t) dt (upper side).
double tail_bound_above(const AmbiguitySet& a, const TestFunction& g,
                        double g_at_zero, double T) {
  const double r = envelope_radius(g.growth_c(), g.growth_m(), T - g_at_zero);
  double sum = 0.0;
  for (const Distribution& d : a.members()) {
    sum += member_growth_tail(d, r, g.growth_c(), g.growth_m());
  }
  return sum;
}

// Bound on int_S^inf [1 - U(-s)] ds (lower side); a minimum over members
// is valid because 1 - U(-s) is a member-wise minimum.
double tail_bound_below(const AmbiguitySet& a, const TestFunction& g,
                        double g_at_zero, double S) {
  const double r = envelope_radius(g.growth_c(), g.growth_m(), g_at_zero + S);
  double best = kInf;
  for (const Distribution& d : a.members()) {
    best = std::min(best, member_growth_tail(d, r, g.growth_c(), g.growth_m()));
  }
  return best;
}

// One side of the Choquet integral: int_0^inf h(u) du over a doubling
// segment schedule, stopped once `tail_bound(c)` certifies the remainder.
double integrate_side(const std::function<double(double)>& h,
                      const std::function<double(double)>& tail_bound,
                      double budget, const char* side) {
  CompensatedSum total;
  double seg_lo = 0.0, seg_hi = 1.0;
  for (int k = 0; k < kMaxSegments; ++k) {
    const double tol_k = budget / static_cast<double>(1ull << (k + 1));
    total.add(integrate(h, seg_lo, seg_hi, std::max(tol_k, 1e-15)).value);
    const double bound = tail_bound(seg_hi);
    if (bound < kTailCut * std::max(1.0, std::abs(total.value()))) {
      return total.value();
    }
    seg_lo = seg_hi;
    seg_hi *= 2.0;
  }
  throw NumericError(std::string("choquet integral: ") + side +
                     " level integral did not converge after " +
                     std::to_string(kMaxSegments) +
                     " segment doublings (tails too heavy)");
}

ChoquetBreakdown choquet_once(const AmbiguitySet& a, const TestFunction& g,
                              const ChoquetOptions& opts, int scan_nodes) {
  LevelSets levels(a, g, scan_nodes);
  const double g0 = g(0.0);
  const double budget = 0.25 * opts.tol;

  ChoquetBreakdown out;
  out.positive_part = integrate_side(
      [&](double t) { return levels.upper_survival(t); },
      [&](double c) { return tail_bound_above(a, g, g0, c); }, budget,
      "positive");
  out.negative_part = -integrate_side(
      [&](double s) { return 1.0 - levels.upper_survival(-s); },
      [&](double c) { return tail_bound_below(a, g, g0, c); }, budget,
      "negative");
  out.value = out.positive_part + out.negative_part;
  return out;
}

}  // namespace

ChoquetBreakdown choquet_upper(const AmbiguitySet& a, const TestFunction& g,
                               const ChoquetOptions& opts) {
  if (g.arity() != 1) {
    throw ContractViolation("choquet integral requires an arity-1 function");
  }
  if (opts.scan_nodes < 17) {
    throw ConfigError("choquet: scan_nodes must be at least 17");
  }
  if (a.all_atoms()) {
    // Exact level sums; no scan grid involved, a single run suffices.
    return choquet_once(a, g, opts, opts.scan_nodes);
  }
  const ChoquetBreakdown coarse = choquet_once(a, g, opts, opts.scan_nodes);
  const ChoquetBreakdown fine =
      choquet_once(a, g, opts, 2 * opts.scan_nodes - 1);
  const double delta = std::abs(fine.value - coarse.value);
  if (delta > opts.tol) {
    throw GridResolutionError(
        "choquet: doubling the level-set scan moved the value by " +
            std::to_string(delta) + " (> " + std::to_string(opts.tol) +
            "); increase scan_nodes",
        delta);
  }
  return fine;
}

}  // namespace sublex
