#include "sublex/test_function.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "sublex/errors.hpp"

namespace sublex {

TestFunction::TestFunction(int arity, Fn eval, double growth_c, int growth_m,
                           bool bounded)
    : arity_(arity),
      eval_(std::move(eval)),
      growth_c_(growth_c),
      growth_m_(growth_m),
      bounded_(bounded) {
  if (arity_ < 1) throw ConfigError("test function arity must be >= 1");
  if (!(growth_c_ >= 0.0) || growth_m_ < 0) {
    throw ConfigError("test function growth constants must be non-negative");
  }
}

TestFunction TestFunction::scalar(std::function<double(double)> f,
                                  double growth_c, int growth_m, bool bounded) {
  return TestFunction(
      1, [f = std::move(f)](std::span<const double> xs) { return f(xs[0]); },
      growth_c, growth_m, bounded);
}

TestFunction TestFunction::constant(double value) {
  return TestFunction(
      1, [value](std::span<const double>) { return value; }, 0.0, 0, true);
}

double TestFunction::operator()(double x) const {
  return eval_(std::span<const double>(&x, 1));
}

TestFunction TestFunction::negated() const {
  return TestFunction(
      arity_, [inner = eval_](std::span<const double> xs) { return -inner(xs); },
      growth_c_, growth_m_, bounded_);
}

TestFunction TestFunction::plus(const TestFunction& other) const {
  if (other.arity_ != arity_) {
    throw ContractViolation("cannot add test functions of different arity");
  }
  return TestFunction(
      arity_,
      [a = eval_, b = other.eval_](std::span<const double> xs) {
        return a(xs) + b(xs);
      },
      growth_c_ + other.growth_c_, std::max(growth_m_, other.growth_m_),
      bounded_ && other.bounded_);
}

TestFunction TestFunction::scaled(double lambda) const {
  if (!(lambda >= 0.0)) {
    throw ContractViolation("scaling factor must be non-negative");
  }
  return TestFunction(
      arity_,
      [inner = eval_, lambda](std::span<const double> xs) {
        return lambda * inner(xs);
      },
      lambda * growth_c_, growth_m_, bounded_);
}

bool TestFunction::spot_check_growth(Rng& rng, int pairs, double radius) const {
  std::vector<double> x(arity_), y(arity_);
  for (int p = 0; p < pairs; ++p) {
    double nx2 = 0.0, ny2 = 0.0, d2 = 0.0;
    for (int i = 0; i < arity_; ++i) {
      x[i] = radius * (2.0 * rng.next_u01() - 1.0);
      y[i] = radius * (2.0 * rng.next_u01() - 1.0);
      nx2 += x[i] * x[i];
      ny2 += y[i] * y[i];
      const double d = x[i] - y[i];
      d2 += d * d;
    }
    const double lhs = std::abs(eval_(x) - eval_(y));
    const double bound =
        growth_c_ *
        (1.0 + std::pow(std::sqrt(nx2), growth_m_) +
         std::pow(std::sqrt(ny2), growth_m_)) *
        std::sqrt(d2);
    if (lhs > bound * (1.0 + 1e-9) + 1e-12) return false;
  }
  return true;
}

}  // namespace sublex
