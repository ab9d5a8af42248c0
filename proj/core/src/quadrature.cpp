#include "sublex/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sublex/errors.hpp"
#include "sublex/rng.hpp"

namespace sublex {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15
// abscissae/weights). Even-indexed nodes are Kronrod-only; odd-indexed
// nodes carry the embedded Gauss rule; index 7 is the centre.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

struct Panel {
  double lo, hi, value, err;
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo,
                     double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(centre);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(centre - dx);
    const double f2 = f(centre + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  Panel p;
  p.lo = lo;
  p.hi = hi;
  p.value = resk * half;
  // |K15 - G7| over-estimates the K15 error on smooth integrands, which is
  // the safe direction for an adaptive stopping rule. A roundoff floor
  // keeps the subdivision loop from chasing noise.
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() *
                          std::abs(p.value);
  p.err = std::max(std::abs(resk - resg) * half, roundoff);
  return p;
}

QuadratureResult run_adaptive(const std::function<double(double)>& f,
                              std::vector<Panel> panels, double abs_tol,
                              std::size_t max_panels) {
  auto by_err = [](const Panel& a, const Panel& b) { return a.err < b.err; };
  std::make_heap(panels.begin(), panels.end(), by_err);
  auto total_err = [&panels] {
    double e = 0.0;
    for (const Panel& p : panels) e += p.err;
    return e;
  };

  while (total_err() > abs_tol && panels.size() < max_panels) {
    std::pop_heap(panels.begin(), panels.end(), by_err);
    const Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval has collapsed to machine width; nothing more to gain.
      panels.push_back(worst);
      std::push_heap(panels.begin(), panels.end(), by_err);
      break;
    }
    panels.push_back(evaluate_panel(f, worst.lo, mid));
    std::push_heap(panels.begin(), panels.end(), by_err);
    panels.push_back(evaluate_panel(f, mid, worst.hi));
    std::push_heap(panels.begin(), panels.end(), by_err);
  }

  // Deterministic final accumulation: sum panels ordered by position.
  std::sort(panels.begin(), panels.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  CompensatedSum value;
  double err = 0.0;
  for (const Panel& p : panels) {
    value.add(p.value);
    err += p.err;
  }

  QuadratureResult r;
  r.value = value.value();
  r.error_estimate = err;
  r.panels = panels.size();
  if (err > abs_tol) {
    throw QuadratureError(
        "adaptive quadrature did not reach the requested tolerance "
        "(achieved " + std::to_string(err) + ", requested " +
            std::to_string(abs_tol) + ")",
        err);
  }
  return r;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double abs_tol, std::size_t max_panels) {
  if (!(lo < hi)) {
    QuadratureResult r;
    return r;  // empty or degenerate interval integrates to zero
  }
  std::vector<Panel> panels{evaluate_panel(f, lo, hi)};
  return run_adaptive(f, std::move(panels), abs_tol, max_panels);
}

QuadratureResult integrate_segmented(const std::function<double(double)>& f,
                                     const std::vector<double>& breakpoints,
                                     double abs_tol, std::size_t max_panels) {
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i] < breakpoints[i + 1]) {
      panels.push_back(evaluate_panel(f, breakpoints[i], breakpoints[i + 1]));
    }
  }
  if (panels.empty()) return QuadratureResult{};
  return run_adaptive(f, std::move(panels), abs_tol, max_panels);
}

}  // namespace sublex
