#include "sublex/nested.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sublex/errors.hpp"
#include "sublex/normal.hpp"
#include "sublex/sublinear.hpp"

namespace sublex {

namespace {

constexpr std::size_t kMaxTableEntries = 1u << 24;  // 16M doubles = 128 MiB

std::size_t checked_pow(std::size_t base, int exp) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && v > kMaxTableEntries / base) {
      throw ConfigError(
          "nested expectation: stage table would exceed " +
          std::to_string(kMaxTableEntries) +
          " entries; reduce arity, atom count or grid nodes");
    }
    v *= base;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Exact route: every member is a finite atom distribution. Stage functions
// are tabulated on tuples over the union of member supports and collapsed
// one coordinate at a time: table_k(prefix) = max over members of the
// member-weighted sum of table_{k+1}(prefix, point).
// ---------------------------------------------------------------------------
double nested_atoms(const AmbiguitySet& a, const TestFunction& f) {
  const int d = f.arity();

  std::vector<double> axis;
  for (const Distribution& m : a.members()) {
    for (const Atom& p : *m.atom_points()) axis.push_back(p.point);
  }
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  const std::size_t na = axis.size();

  // Per member: (axis index, weight) of each atom. Points match axis
  // entries exactly because both come from the same stored doubles.
  struct IndexedAtom {
    std::size_t idx;
    double w;
  };
  std::vector<std::vector<IndexedAtom>> member_atoms;
  for (const Distribution& m : a.members()) {
    std::vector<IndexedAtom> ia;
    for (const Atom& p : *m.atom_points()) {
      const auto it = std::lower_bound(axis.begin(), axis.end(), p.point);
      ia.push_back({static_cast<std::size_t>(it - axis.begin()), p.weight});
    }
    member_atoms.push_back(std::move(ia));
  }

  // Innermost table: f evaluated on every tuple of axis points.
  std::size_t size = checked_pow(na, d);
  std::vector<double> table(size);
  std::vector<double> tuple(d);
  for (std::size_t flat = 0; flat < size; ++flat) {
    std::size_t rest = flat;
    for (int k = d - 1; k >= 0; --k) {
      tuple[k] = axis[rest % na];
      rest /= na;
    }
    table[flat] = f(tuple);
  }

  for (int k = d; k >= 1; --k) {
    const std::size_t prefix_count = size / na;
    std::vector<double> next(prefix_count);
    for (std::size_t p = 0; p < prefix_count; ++p) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& atoms : member_atoms) {
        double s = 0.0;
        for (const IndexedAtom& ia : atoms) s += ia.w * table[p * na + ia.idx];
        best = std::max(best, s);
      }
      next[p] = best;
    }
    table = std::move(next);
    size = prefix_count;
  }
  return table[0];
}

// ---------------------------------------------------------------------------
// Grid route: stage functions are tabulated on a uniform per-axis grid over
// the family hull. The integrated coordinate is treated as piecewise linear
// between nodes, which every member kind integrates in closed form.
// ---------------------------------------------------------------------------

// E g(Y) where g is piecewise linear through (grid[j], vals[j]) and Y ~ d.
// Mass outside the grid is ignored; the grid spans the family hull, so for
// gaussian members that is < 2e-33.
double pl_expect(const std::vector<double>& grid, const double* vals,
                 const Distribution& d) {
  const std::size_t n = grid.size();
  switch (d.kind()) {
    case Distribution::Kind::kAtoms: {
      double s = 0.0;
      for (const Atom& p : *d.atom_points()) {
        auto it = std::upper_bound(grid.begin(), grid.end(), p.point);
        std::size_t j = (it == grid.begin())
                            ? 0
                            : static_cast<std::size_t>(it - grid.begin()) - 1;
        j = std::min(j, n - 2);
        const double t = (p.point - grid[j]) / (grid[j + 1] - grid[j]);
        s += p.weight * (vals[j] + (vals[j + 1] - vals[j]) * t);
      }
      return s;
    }
    case Distribution::Kind::kUniform: {
      const double a = d.uniform_lo(), b = d.uniform_hi();
      const double inv_len = 1.0 / (b - a);
      double s = 0.0;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        const double lo = std::max(grid[j], a);
        const double hi = std::min(grid[j + 1], b);
        if (!(lo < hi)) continue;
        const double seg = grid[j + 1] - grid[j];
        const double vlo =
            vals[j] + (vals[j + 1] - vals[j]) * (lo - grid[j]) / seg;
        const double vhi =
            vals[j] + (vals[j + 1] - vals[j]) * (hi - grid[j]) / seg;
        s += (hi - lo) * 0.5 * (vlo + vhi) * inv_len;
      }
      return s;
    }
    case Distribution::Kind::kGaussian: {
      const double mu = d.gaussian_mean(), sd = d.gaussian_sd();
      double s = 0.0;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        const double x0 = grid[j], x1 = grid[j + 1];
        const double z0 = (x0 - mu) / sd, z1 = (x1 - mu) / sd;
        const double mass = normal::cdf(z1) - normal::cdf(z0);
        if (mass <= 0.0) continue;
        // First moment of Y over the segment.
        const double m1 = mu * mass + sd * (normal::pdf(z0) - normal::pdf(z1));
        const double slope = (vals[j + 1] - vals[j]) / (x1 - x0);
        s += vals[j] * mass + slope * (m1 - x0 * mass);
      }
      return s;
    }
  }
  return 0.0;
}

double nested_grid_once(const AmbiguitySet& a, const TestFunction& f, int n,
                        double quad_tol) {
  const int d = f.arity();
  const auto [lo, hi] = a.hull();
  std::vector<double> grid(n);
  for (int j = 0; j < n; ++j) {
    grid[j] = lo + (hi - lo) * static_cast<double>(j) / (n - 1);
  }

  // Innermost stage: integrate f itself (no interpolation in the last
  // coordinate), one member quadrature per prefix tuple.
  std::size_t size = checked_pow(static_cast<std::size_t>(n), d - 1);
  std::vector<double> table(size);
  std::vector<double> tuple(d);
  for (std::size_t flat = 0; flat < size; ++flat) {
    std::size_t rest = flat;
    for (int k = d - 2; k >= 0; --k) {
      tuple[k] = grid[rest % n];
      rest /= n;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const Distribution& m : a.members()) {
      const double e = m.expect(
          [&](double y) {
            tuple[d - 1] = y;
            return f(tuple);
          },
          quad_tol);
      best = std::max(best, e);
    }
    table[flat] = best;
  }

  // Outer stages: collapse the trailing coordinate through the piecewise
  // linear closed forms.
  for (int k = d - 1; k >= 1; --k) {
    const std::size_t prefix_count = size / n;
    std::vector<double> next(prefix_count);
    for (std::size_t p = 0; p < prefix_count; ++p) {
      double best = -std::numeric_limits<double>::infinity();
      for (const Distribution& m : a.members()) {
        best = std::max(best, pl_expect(grid, table.data() + p * n, m));
      }
      next[p] = best;
    }
    table = std::move(next);
    size = prefix_count;
  }
  return table[0];
}

}  // namespace

double nested_expectation(const AmbiguitySet& a, const TestFunction& f,
                          const GridSpec& grid) {
  if (f.arity() == 1) return upper_expectation(a, f, grid.quad_tol);
  if (a.all_atoms()) return nested_atoms(a, f);

  if (grid.nodes_per_axis < 3) {
    throw ConfigError("nested expectation: grid needs at least 3 nodes");
  }
  const int n = grid.nodes_per_axis;
  const double coarse = nested_grid_once(a, f, n, grid.quad_tol);
  const double fine = nested_grid_once(a, f, 2 * n - 1, grid.quad_tol);
  const double delta = std::abs(fine - coarse);
  if (delta > grid.richardson_tol) {
    throw GridResolutionError(
        "nested expectation: grid refinement moved the value by " +
            std::to_string(delta) + " (> " +
            std::to_string(grid.richardson_tol) +
            "); increase nodes_per_axis",
        delta);
  }
  return fine;
}

}  // namespace sublex
