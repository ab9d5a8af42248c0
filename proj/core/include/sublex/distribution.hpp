#pragma once

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "sublex/rng.hpp"
#include "sublex/test_function.hpp"

namespace sublex {

/// One weighted support point of a discrete distribution.
struct Atom {
  double point = 0.0;
  double weight = 1.0;
};

/// A one-dimensional distribution of one of three parametric kinds:
/// finite atoms, uniform on [a, b], or gaussian. Construction validates
/// the parameters (weights positive and summing to one within 1e-12,
/// points strictly increasing, a < b, sd > 0) and throws ConfigError
/// naming the offending field otherwise.
///
/// Sampling is inverse-CDF everywhere — one uniform draw per variate —
/// so a fixed seed pins the sample path bit-for-bit.
class Distribution {
 public:
  enum class Kind { kAtoms, kUniform, kGaussian };

  static Distribution atoms(std::vector<Atom> points);
  /// Convenience: the point mass at x.
  static Distribution point_mass(double x);
  static Distribution uniform(double a, double b);
  static Distribution gaussian(double mean, double sd);

  Kind kind() const;

  /// Exact first moment.
  double mean() const;
  /// Exact standard deviation.
  double stddev() const;

  /// P(X >= t). Handles t = +/-infinity (0 and 1 respectively).
  double tail(double t) const;

  /// P(lo <= X < hi) == tail(lo) - tail(hi); exact for every kind.
  double interval_prob(double lo, double hi) const;

  /// E f(X). Exact weighted sum for atoms; adaptive Gauss-Kronrod
  /// quadrature to absolute tolerance abs_tol otherwise. The gaussian
  /// integral is taken over mean +/- 12 sd (omitted mass < 2e-33).
  double expect(const std::function<double(double)>& f,
                double abs_tol = 1e-9) const;
  double expect(const TestFunction& f, double abs_tol = 1e-9) const;

  /// Inverse CDF at u in [0, 1). Atoms: smallest point whose cumulative
  /// weight exceeds u. Uniform: a + u*(b - a). Gaussian: mean + sd *
  /// normal quantile (rational approximation; u = 0.5 maps to the mean
  /// exactly).
  double quantile(double u) const;

  /// quantile(rng.next_u01()) — exactly one uniform draw.
  double sample(Rng& rng) const;

  /// E (X - c)^+ in closed form; the building block of integrated-tail
  /// bounds.
  double expected_excess(double c) const;
  /// E (|X| - c)^+ in closed form.
  double expected_excess_abs(double c) const;

  /// Distribution of -X.
  Distribution reflected() const;

  /// Interval outside which the distribution carries (essentially) no
  /// mass: exact support for atoms/uniform, mean +/- 12 sd for gaussian.
  std::pair<double, double> integration_hull() const;

  /// Non-null iff kind() == kAtoms.
  const std::vector<Atom>* atom_points() const;

  /// Parameter accessors (valid for the matching kind only).
  double uniform_lo() const;
  double uniform_hi() const;
  double gaussian_mean() const;
  double gaussian_sd() const;

 private:
  struct AtomData {
    std::vector<Atom> pts;
  };
  struct UniformData {
    double a, b;
  };
  struct GaussianData {
    double mean, sd;
  };

  explicit Distribution(std::variant<AtomData, UniformData, GaussianData> s)
      : storage_(std::move(s)) {}

  std::variant<AtomData, UniformData, GaussianData> storage_;
};

}  // namespace sublex
