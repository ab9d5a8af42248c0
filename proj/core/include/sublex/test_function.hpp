#pragma once

#include <functional>
#include <span>

#include "sublex/rng.hpp"

namespace sublex {

/// A Borel test function R^d -> R together with its declared regularity:
/// a local Lipschitz growth bound
///
///   |f(x) - f(y)| <= growth_c * (1 + |x|^growth_m + |y|^growth_m) * |x - y|
///
/// (Euclidean norms) and a flag saying whether f is globally bounded.
/// The growth declaration is what integration tail cut-offs rely on, so it
/// can be spot-checked on random point pairs.
class TestFunction {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  TestFunction(int arity, Fn eval, double growth_c, int growth_m, bool bounded);

  /// Convenience constructor for one-dimensional functions.
  static TestFunction scalar(std::function<double(double)> f, double growth_c,
                             int growth_m, bool bounded);

  /// The constant function x -> value (arity 1, bounded, zero slope).
  static TestFunction constant(double value);

  int arity() const { return arity_; }
  double growth_c() const { return growth_c_; }
  int growth_m() const { return growth_m_; }
  bool bounded() const { return bounded_; }

  double operator()(std::span<const double> xs) const { return eval_(xs); }
  double operator()(double x) const;

  /// -f, with the same growth declaration.
  TestFunction negated() const;
  /// f + g (equal arity), growth constants added.
  TestFunction plus(const TestFunction& other) const;
  /// lambda * f, lambda >= 0.
  TestFunction scaled(double lambda) const;

  /// Verifies the declared growth bound on `pairs` random pairs drawn
  /// uniformly from [-radius, radius]^d. Returns false on first failure.
  bool spot_check_growth(Rng& rng, int pairs = 200, double radius = 3.0) const;

 private:
  int arity_;
  Fn eval_;
  double growth_c_;
  int growth_m_;
  bool bounded_;
};

}  // namespace sublex
