#include <doctest.h>

#include <cmath>

#include "sublex/ambiguity_set.hpp"
#include "sublex/errors.hpp"
#include "sublex/sublinear.hpp"
#include "sublex/test_function.hpp"

using namespace sublex;

namespace {

AmbiguitySet gaussian_pair() {
  return AmbiguitySet({Distribution::gaussian(-1.0, 1.0),
                       Distribution::gaussian(1.0, 1.0)});
}

TestFunction tanh_fn() {
  return TestFunction::scalar([](double x) { return std::tanh(x); }, 1.0, 0,
                              true);
}

}  // namespace

TEST_CASE("sublinear: upper expectation is the member maximum") {
  // E tanh(X) is odd in the gaussian mean, so the X ~ N(1,1) member wins:
  // 0.55040049079332717 (mpmath quadrature).
  const double up = upper_expectation(gaussian_pair(), tanh_fn(), 1e-10);
  CHECK(up == doctest::Approx(0.55040049079332717).epsilon(1e-9));
  const double low = lower_expectation(gaussian_pair(), tanh_fn(), 1e-10);
  CHECK(low == doctest::Approx(-0.55040049079332717).epsilon(1e-9));
}

TEST_CASE("sublinear: conjugacy is a bit-exact identity") {
  const AmbiguitySet fam({Distribution::uniform(-1.0, 2.0),
                          Distribution::gaussian(0.5, 1.5),
                          Distribution::atoms({{-2.0, 0.3}, {1.0, 0.7}})});
  const TestFunction f = TestFunction::scalar(
      [](double x) { return std::tanh(2.0 * x - 0.5) + 0.25 * x; }, 2.25, 0,
      false);
  CHECK(lower_expectation(fam, f) == -upper_expectation(fam, f.negated()));
  CHECK(lower_expectation(fam, f.negated()) == -upper_expectation(fam, f));
}

TEST_CASE("sublinear: axioms hold with quadrature slack") {
  const AmbiguitySet fam = gaussian_pair();
  const TestFunction f = tanh_fn();
  const TestFunction g = TestFunction::scalar(
      [](double x) { return 1.0 / (1.0 + x * x); }, 2.0, 0, true);
  const double sf = upper_expectation(fam, f);
  const double sg = upper_expectation(fam, g);
  const double tol = 1e-9;

  // monotonicity: f <= f + g (g >= 0)
  CHECK(upper_expectation(fam, f.plus(g)) >= sf - tol);
  // constants
  CHECK(upper_expectation(fam, TestFunction::constant(3.25)) ==
        doctest::Approx(3.25).epsilon(1e-12));
  // sub-additivity
  CHECK(upper_expectation(fam, f.plus(g)) <= sf + sg + tol);
  // positive homogeneity
  CHECK(upper_expectation(fam, f.scaled(2.5)) ==
        doctest::Approx(2.5 * sf).epsilon(1e-9));
  // lower <= upper sandwich
  CHECK(lower_expectation(fam, f) <= upper_expectation(fam, f) + tol);
}

TEST_CASE("sublinear: singleton family collapses to a plain expectation") {
  const AmbiguitySet one({Distribution::uniform(0.0, 2.0)});
  const TestFunction sq =
      TestFunction::scalar([](double x) { return x * x; }, 4.0, 1, false);
  // E X^2 = 8/6 = 4/3 for U(0,2).
  CHECK(upper_expectation(one, sq) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(upper_expectation(one, sq) == -lower_expectation(one, sq.negated()));
}

TEST_CASE("sublinear: truncation helper clamps both sides") {
  CHECK(truncate(5.0, 2.0) == 2.0);
  CHECK(truncate(-5.0, 2.0) == -2.0);
  CHECK(truncate(1.5, 2.0) == 1.5);
}

TEST_CASE("sublinear: truncated mean limits recover the member extremes") {
  // Every supported member kind has integrable tails, so the truncated
  // upper/lower means converge to the exact member mean extremes.
  const MeanFunctional m = truncated_mean_limit(gaussian_pair());
  CHECK(m.mu_lower == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(m.mu_upper == doctest::Approx(1.0).epsilon(1e-8));

  const AmbiguitySet bounded({Distribution::uniform(0.0, 1.0),
                              Distribution::uniform(0.0, 2.0)});
  const MeanFunctional mb = truncated_mean_limit(bounded);
  CHECK(mb.mu_lower == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mb.mu_upper == doctest::Approx(1.0).epsilon(1e-12));

  const AmbiguitySet atoms({Distribution::point_mass(0.0),
                            Distribution::point_mass(1.0)});
  const MeanFunctional ma = truncated_mean_limit(atoms);
  CHECK(ma.mu_lower == 0.0);
  CHECK(ma.mu_upper == 1.0);
}

TEST_CASE("sublinear: ambiguity set basics") {
  const AmbiguitySet fam = gaussian_pair();
  CHECK(fam.size() == 2);
  CHECK(fam.mean_interval() == std::pair<double, double>{-1.0, 1.0});
  CHECK(fam.hull() == std::pair<double, double>{-13.0, 13.0});
  CHECK_FALSE(fam.all_atoms());
  CHECK_THROWS_AS(AmbiguitySet({}), ConfigError);

  const ExtremalPair pair = extremal_pair(fam);
  CHECK(pair.upper_index == 1);
  CHECK(pair.lower_index == 0);
  CHECK(pair.p_upper.mean() == 1.0);
  CHECK(pair.p_lower.mean() == -1.0);

  // Ties break towards the lowest index.
  const AmbiguitySet tied({Distribution::point_mass(0.5),
                           Distribution::uniform(0.0, 1.0),
                           Distribution::point_mass(0.5)});
  const ExtremalPair tp = extremal_pair(tied);
  CHECK(tp.upper_index == 0);
  CHECK(tp.lower_index == 0);
}

TEST_CASE("sublinear: test function growth spot checks") {
  Rng rng(99u);
  CHECK(tanh_fn().spot_check_growth(rng));
  // A deliberately under-declared slope fails the spot check.
  const TestFunction lying = TestFunction::scalar(
      [](double x) { return 10.0 * x; }, 0.5, 0, false);
  CHECK_FALSE(lying.spot_check_growth(rng));
}
