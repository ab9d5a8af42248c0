#include "sublex/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sublex/errors.hpp"
#include "sublex/normal.hpp"
#include "sublex/quadrature.hpp"

namespace sublex {

namespace {
constexpr double kGaussianHullSds = 12.0;  // omitted mass < 2e-33
constexpr double kWeightSumTol = 1e-12;
}  // namespace

Distribution Distribution::atoms(std::vector<Atom> points) {
  if (points.empty()) throw ConfigError("atoms: at least one point required");
  double wsum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Atom& a = points[i];
    if (!std::isfinite(a.point)) {
      throw ConfigError("atoms: point " + std::to_string(i) + " not finite");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw ConfigError("atoms: weight " + std::to_string(i) +
                        " must be positive and finite");
    }
    if (i > 0 && !(points[i - 1].point < a.point)) {
      throw ConfigError("atoms: points must be strictly increasing");
    }
    wsum += a.weight;
  }
  if (std::abs(wsum - 1.0) > kWeightSumTol) {
    throw ConfigError("atoms: weights sum to " + std::to_string(wsum) +
                      ", expected 1 within 1e-12");
  }
  return Distribution(AtomData{std::move(points)});
}

Distribution Distribution::point_mass(double x) {
  return atoms({Atom{x, 1.0}});
}

Distribution Distribution::uniform(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw ConfigError("uniform: endpoints must be finite with a < b");
  }
  return Distribution(UniformData{a, b});
}

Distribution Distribution::gaussian(double mean, double sd) {
  if (!std::isfinite(mean)) throw ConfigError("gaussian: mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw ConfigError("gaussian: sd must be positive and finite");
  }
  return Distribution(GaussianData{mean, sd});
}

Distribution::Kind Distribution::kind() const {
  switch (storage_.index()) {
    case 0: return Kind::kAtoms;
    case 1: return Kind::kUniform;
    default: return Kind::kGaussian;
  }
}

double Distribution::mean() const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    CompensatedSum s;
    for (const Atom& p : a->pts) s.add(p.weight * p.point);
    return s.value();
  }
  if (const auto* u = std::get_if<UniformData>(&storage_)) {
    return 0.5 * (u->a + u->b);
  }
  return std::get<GaussianData>(storage_).mean;
}

double Distribution::stddev() const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    const double m = mean();
    CompensatedSum s;
    for (const Atom& p : a->pts) s.add(p.weight * (p.point - m) * (p.point - m));
    return std::sqrt(std::max(0.0, s.value()));
  }
  if (const auto* u = std::get_if<UniformData>(&storage_)) {
    return (u->b - u->a) / std::sqrt(12.0);
  }
  return std::get<GaussianData>(storage_).sd;
}

double Distribution::tail(double t) const {
  if (t == -std::numeric_limits<double>::infinity()) return 1.0;
  if (t == std::numeric_limits<double>::infinity()) return 0.0;
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    double s = 0.0;
    for (const Atom& p : a->pts) {
      if (p.point >= t) s += p.weight;
    }
    return s;
  }
  if (const auto* u = std::get_if<UniformData>(&storage_)) {
    if (t <= u->a) return 1.0;
    if (t >= u->b) return 0.0;
    return (u->b - t) / (u->b - u->a);
  }
  const auto& g = std::get<GaussianData>(storage_);
  return normal::tail((t - g.mean) / g.sd);
}

double Distribution::interval_prob(double lo, double hi) const {
  if (!(lo < hi)) return 0.0;
  return std::max(0.0, tail(lo) - tail(hi));
}

double Distribution::expect(const std::function<double(double)>& f,
                            double abs_tol) const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    CompensatedSum s;
    for (const Atom& p : a->pts) s.add(p.weight * f(p.point));
    return s.value();
  }
  if (const auto* u = std::get_if<UniformData>(&storage_)) {
    const double inv_len = 1.0 / (u->b - u->a);
    auto integrand = [&f, inv_len](double x) { return f(x) * inv_len; };
    return integrate(integrand, u->a, u->b, abs_tol).value;
  }
  const auto& g = std::get<GaussianData>(storage_);
  auto integrand = [&f, &g](double x) {
    return f(x) * normal::pdf((x - g.mean) / g.sd) / g.sd;
  };
  // Seed panels at scale changes of the density so the heap converges fast.
  std::vector<double> breaks;
  for (double off : {-kGaussianHullSds, -4.0, -1.0, 0.0, 1.0, 4.0,
                     kGaussianHullSds}) {
    breaks.push_back(g.mean + off * g.sd);
  }
  return integrate_segmented(integrand, breaks, abs_tol).value;
}

double Distribution::expect(const TestFunction& f, double abs_tol) const {
  if (f.arity() != 1) {
    throw ContractViolation("expect: test function must have arity 1");
  }
  return expect([&f](double x) { return f(x); }, abs_tol);
}

double Distribution::quantile(double u) const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    double cum = 0.0;
    for (const Atom& p : a->pts) {
      cum += p.weight;
      if (u < cum) return p.point;
    }
    return a->pts.back().point;  // guards the 1e-12 weight-sum slack
  }
  if (const auto* un = std::get_if<UniformData>(&storage_)) {
    return un->a + u * (un->b - un->a);
  }
  const auto& g = std::get<GaussianData>(storage_);
  // next_u01 can return exactly 0 (probability 2^-53); clamp away from the
  // quantile's pole rather than produce -infinity.
  return g.mean + g.sd * normal::quantile(std::max(u, 0x1.0p-53));
}

double Distribution::sample(Rng& rng) const { return quantile(rng.next_u01()); }

double Distribution::expected_excess(double c) const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    double s = 0.0;
    for (const Atom& p : a->pts) s += p.weight * std::max(0.0, p.point - c);
    return s;
  }
  if (const auto* u = std::get_if<UniformData>(&storage_)) {
    if (c >= u->b) return 0.0;
    const double lo = std::max(u->a, c);
    return ((u->b - c) * (u->b - c) - (lo - c) * (lo - c)) /
           (2.0 * (u->b - u->a));
  }
  const auto& g = std::get<GaussianData>(storage_);
  return g.sd * normal::excess((c - g.mean) / g.sd);
}

double Distribution::expected_excess_abs(double c) const {
  return expected_excess(c) + reflected().expected_excess(c);
}

Distribution Distribution::reflected() const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    std::vector<Atom> pts(a->pts.rbegin(), a->pts.rend());
    for (Atom& p : pts) p.point = -p.point;
    return Distribution(AtomData{std::move(pts)});
  }
  if (const auto* u = std::get_if<UniformData>(&storage_)) {
    return Distribution(UniformData{-u->b, -u->a});
  }
  const auto& g = std::get<GaussianData>(storage_);
  return Distribution(GaussianData{-g.mean, g.sd});
}

std::pair<double, double> Distribution::integration_hull() const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) {
    return {a->pts.front().point, a->pts.back().point};
  }
  if (const auto* u = std::get_if<UniformData>(&storage_)) {
    return {u->a, u->b};
  }
  const auto& g = std::get<GaussianData>(storage_);
  return {g.mean - kGaussianHullSds * g.sd, g.mean + kGaussianHullSds * g.sd};
}

const std::vector<Atom>* Distribution::atom_points() const {
  if (const auto* a = std::get_if<AtomData>(&storage_)) return &a->pts;
  return nullptr;
}

double Distribution::uniform_lo() const {
  return std::get<UniformData>(storage_).a;
}
double Distribution::uniform_hi() const {
  return std::get<UniformData>(storage_).b;
}
double Distribution::gaussian_mean() const {
  return std::get<GaussianData>(storage_).mean;
}
double Distribution::gaussian_sd() const {
  return std::get<GaussianData>(storage_).sd;
}

}  // namespace sublex
