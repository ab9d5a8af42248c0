#include <doctest.h>

#include <cmath>
#include <vector>

#include "sublex/ambiguity_set.hpp"
#include "sublex/errors.hpp"
#include "sublex/rng.hpp"
#include "sublex/steering.hpp"

using namespace sublex;

namespace {
const MeanFunctional kUnit{0.0, 1.0};
}

TEST_CASE("steering: mixture weights solve the two-point mean equation") {
  CHECK(mixture_weight(0.0, kUnit) == 0.0);   // exact at the endpoints
  CHECK(mixture_weight(1.0, kUnit) == 1.0);
  CHECK(mixture_weight(0.25, kUnit) == 0.25);
  CHECK(mixture_weight(0.7, MeanFunctional{-1.0, 1.0}) ==
        doctest::Approx(0.85).epsilon(1e-15));
  // Degenerate interval: weight pinned to 1.
  CHECK(mixture_weight(2.0, MeanFunctional{2.0, 2.0}) == 1.0);
  CHECK_THROWS_AS(mixture_weight(1.5, kUnit), ContractViolation);
  CHECK_THROWS_AS(mixture_weight(-0.5, kUnit), ContractViolation);
}

TEST_CASE("steering: clamp maps into the interval") {
  CHECK(clamp_to_interval(0.5, kUnit) == 0.5);
  CHECK(clamp_to_interval(-3.0, kUnit) == 0.0);
  CHECK(clamp_to_interval(3.0, kUnit) == 1.0);
}

TEST_CASE("steering: kernel endpoints are deterministic for point masses") {
  const AmbiguitySet fam({Distribution::point_mass(0.0),
                          Distribution::point_mass(1.0)});
  const MixtureKernel kernel(extremal_pair(fam), kUnit);
  Rng rng(1u);
  for (int i = 0; i < 50; ++i) {
    CHECK(kernel.sample(1.0, rng) == 1.0);  // weight 1: u < 1 always
    CHECK(kernel.sample(0.0, rng) == 0.0);  // weight 0: u < 0 never
  }
}

TEST_CASE("steering: kernel draws exactly two uniforms per step") {
  const AmbiguitySet fam({Distribution::uniform(0.0, 1.0),
                          Distribution::uniform(2.0, 3.0)});
  const MixtureKernel kernel(extremal_pair(fam), MeanFunctional{0.5, 2.5});
  Rng a(42u), b(42u);
  const double x = kernel.sample(1.5, a);
  const double u1 = b.next_u01();
  const double u2 = b.next_u01();
  // weight(1.5) = 0.5; the second uniform feeds the member's inverse CDF.
  const double expect = (u1 < 0.5) ? 2.0 + u2 : 0.0 + u2;
  CHECK(x == expect);
  // The two streams stay aligned step after step.
  const double x2 = kernel.sample(1.5, a);
  const double v1 = b.next_u01();
  const double v2 = b.next_u01();
  CHECK(x2 == ((v1 < 0.5) ? 2.0 + v2 : v2));
}

TEST_CASE("steering: kernel mean calibration at a pinned seed") {
  // E[draw at target phi] = phi by construction; check the running mean.
  const AmbiguitySet fam({Distribution::gaussian(-1.0, 1.0),
                          Distribution::gaussian(1.0, 1.0)});
  const MixtureKernel kernel(extremal_pair(fam), MeanFunctional{-1.0, 1.0});
  Rng rng(7u);
  CompensatedSum sum;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum.add(kernel.sample(0.25, rng));
  CHECK(sum.value() / n == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("schedule: factorial block ends and lengths are exact integers") {
  const OscillationSchedule s = oscillation_schedule(10);
  CHECK(s.num_blocks() == 10);
  std::int64_t factorial = 1;
  for (int k = 1; k <= 10; ++k) {
    factorial *= k;
    CHECK(s.block_end(k) == factorial);
  }
  CHECK(s.block_length(1) == 1);
  CHECK(s.block_length(2) == 1);   // 1 * T_1
  CHECK(s.block_length(3) == 4);   // 2 * T_2
  CHECK(s.block_length(4) == 18);  // 3 * T_3
  CHECK(s.total_length() == 3628800);
  CHECK(OscillationSchedule::block_value(1) == 1);
  CHECK(OscillationSchedule::block_value(2) == 0);
}

TEST_CASE("schedule: epsilon prefix and exact ones counts") {
  const OscillationSchedule s = oscillation_schedule(9);
  // Blocks: [1], [2], [3..6], [7..24], ... with values 1,0,1,0,...
  const std::vector<int> expect{1, 0, 1, 1, 1, 1, 0, 0};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(s.epsilon(static_cast<std::int64_t>(i) + 1) == expect[i]);
  }
  CHECK(s.ones_up_to(0) == 0);
  CHECK(s.ones_up_to(1) == 1);
  CHECK(s.ones_up_to(2) == 1);
  CHECK(s.ones_up_to(6) == 5);
  CHECK(s.ones_up_to(24) == 5);
  CHECK(s.ones_up_to(120) == 101);     // 5 + 4 * 24
  CHECK(s.ones_up_to(720) == 101);
  CHECK(s.ones_up_to(5040) == 4421);   // 101 + 6 * 720
  CHECK(s.ones_up_to(40320) == 4421);
  CHECK(s.ones_up_to(362880) == 326981);  // 4421 + 8 * 40320

  // Block-end running means hug the design bounds: >= (k-1)/k after odd
  // blocks, <= 1/k after even ones (exact integer comparisons).
  for (int k = 1; k <= 9; ++k) {
    const std::int64_t end = s.block_end(k);
    const std::int64_t ones = s.ones_up_to(end);
    if (k % 2 == 1) {
      CHECK(ones * k >= (k - 1) * end);
    } else {
      CHECK(ones * k <= end);
    }
  }

  CHECK_THROWS_AS(s.epsilon(0), ContractViolation);
  CHECK_THROWS_AS(s.epsilon(362881), ContractViolation);
}

TEST_CASE("schedule: overflow reports the largest feasible block count") {
  // T_8 = 40320 fits a 40320-step cap, T_9 does not.
  CHECK_NOTHROW(oscillation_schedule(8, 40320));
  bool threw = false;
  try {
    oscillation_schedule(9, 40320);
  } catch (const ScheduleOverflowError& e) {
    threw = true;
    CHECK(e.max_feasible_blocks() == 8);
  }
  CHECK(threw);

  // 21! overflows the default 2^62 cap.
  CHECK_THROWS_AS(oscillation_schedule(21), ScheduleOverflowError);
  CHECK_NOTHROW(oscillation_schedule(20));
}

TEST_CASE("targets: constant mode clamps once and has arity zero") {
  const TargetSequence t = TargetSequence::constant(5.0, kUnit);
  CHECK(t.arity() == 0);
  CHECK(t.limit_index() == 0);
  CHECK(t.eval(0, {}) == 1.0);  // clamped into [0,1]
  CHECK(t.eval(1000, {}) == 1.0);
}

TEST_CASE("targets: finite-dimensional mode switches at the arity") {
  // phi(x1, x2) = (x1 + x2) / 4, clamped into [0, 1].
  const TestFunction phi(
      2, [](std::span<const double> x) { return (x[0] + x[1]) / 4.0; }, 0.5,
      0, false);
  const TargetSequence t = make_finite_dim_targets(phi, kUnit);
  CHECK(t.arity() == 2);
  CHECK(t.limit_index() == 2);
  CHECK(t.prefix_value() == 0.0);  // clamp(0) into [0,1]

  const std::vector<double> xs{1.0, 2.0, 0.0, 0.0};
  CHECK(t.eval(0, xs) == 0.0);    // prefix
  CHECK(t.eval(1, xs) == 0.0);    // prefix
  CHECK(t.eval(2, xs) == 0.75);   // (1 + 2) / 4
  CHECK(t.eval(9, xs) == 0.75);   // settled: only the first 2 coords count
}

TEST_CASE("targets: oscillating mode flips between the clamped bounds") {
  const OscillationSchedule s = oscillation_schedule(4);  // length 24
  const TargetSequence t = make_oscillating_targets(
      TestFunction::constant(0.25), TestFunction::constant(0.75), s, kUnit);
  CHECK(t.arity() == 1);
  const std::vector<double> xs{0.0};
  // epsilon_1..6 = 1,0,1,1,1,1 -> hi,lo,hi,hi,hi,hi
  CHECK(t.eval(1, xs) == 0.75);
  CHECK(t.eval(2, xs) == 0.25);
  CHECK(t.eval(3, xs) == 0.75);
  CHECK(t.eval(6, xs) == 0.75);
  CHECK(t.eval(7, xs) == 0.25);  // block 4 is zeros
  CHECK(t.eval(0, xs) == 0.0);   // prefix before the first draw

  // Bounds ordered the wrong way on the realized path throw.
  const TargetSequence bad = make_oscillating_targets(
      TestFunction::constant(0.75), TestFunction::constant(0.25), s, kUnit);
  CHECK_THROWS_AS(bad.eval(1, xs), ContractViolation);
}

TEST_CASE("targets: oscillating bounds must share an arity") {
  const OscillationSchedule s = oscillation_schedule(3);
  const TestFunction one = TestFunction::constant(0.0);
  const TestFunction two(
      2, [](std::span<const double>) { return 0.0; }, 0.0, 0, true);
  CHECK_THROWS_AS(make_oscillating_targets(one, two, s, kUnit), ConfigError);
}
