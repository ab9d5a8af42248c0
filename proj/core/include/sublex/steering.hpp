#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sublex/ambiguity_set.hpp"
#include "sublex/sublinear.hpp"
#include "sublex/test_function.hpp"

namespace sublex {

/// Clamp y into [m.mu_lower, m.mu_upper].
double clamp_to_interval(double y, const MeanFunctional& m);

/// Mixture weight w solving w * mu_upper + (1 - w) * mu_lower = target.
/// Exactly 1 at the upper endpoint, exactly 0 at the lower endpoint, and
/// 1 when the interval is degenerate. Throws ContractViolation when the
/// target lies outside the interval.
double mixture_weight(double target, const MeanFunctional& m);

/// The adapted two-component kernel: given the running target value, draw
/// from the max-mean member with probability mixture_weight(target) and
/// from the min-mean member otherwise. Each draw consumes exactly two
/// uniforms — one for the Bernoulli pick, one for the member's inverse
/// CDF — so paths are reproducible bit-for-bit from the seed.
class MixtureKernel {
 public:
  MixtureKernel(ExtremalPair pair, MeanFunctional interval);

  double weight_of(double target) const;
  double sample(double target, Rng& rng) const;

  const MeanFunctional& interval() const { return interval_; }
  const ExtremalPair& pair() const { return pair_; }

 private:
  ExtremalPair pair_;
  MeanFunctional interval_;
};

/// Deterministic factorial block schedule: block k has length
/// L_1 = 1, L_k = (k-1) * T_{k-1}, so T_k = sum L_j = k! exactly. Odd
/// blocks emit 1, even blocks emit 0. The block-end partial means then
/// provably reach >= (k-1)/k after odd blocks and <= 1/k after even ones,
/// which is what drives a running mean back and forth across the whole
/// target interval.
class OscillationSchedule {
 public:
  /// Throws ScheduleOverflowError (naming the largest feasible block
  /// count) if T_num_blocks would exceed max_length.
  static OscillationSchedule with_blocks(
      int num_blocks, std::int64_t max_length = (std::int64_t{1} << 62));

  int num_blocks() const { return static_cast<int>(block_end_.size()); }
  /// T_K, the total schedule length.
  std::int64_t total_length() const { return block_end_.back(); }
  /// L_k for k in [1, num_blocks].
  std::int64_t block_length(int k) const;
  /// T_k for k in [1, num_blocks].
  std::int64_t block_end(int k) const;
  /// The bit emitted in block k: 1 if k is odd.
  static int block_value(int k) { return k % 2; }

  /// epsilon_i for i in [1, total_length()].
  int epsilon(std::int64_t i) const;
  /// Exact count of ones among epsilon_1 .. epsilon_n (integer arithmetic).
  std::int64_t ones_up_to(std::int64_t n) const;

 private:
  std::vector<std::int64_t> block_end_;
};

/// Factory matching the schedule's natural name at the call sites.
OscillationSchedule oscillation_schedule(
    int num_blocks, std::int64_t max_length = (std::int64_t{1} << 62));

/// The target stream phi_0, phi_1, ... that the kernel chases. eval(i, xs)
/// is the value used to draw x_{i+1}, given the realized prefix x_1..x_i
/// (only the first min(i, arity) coordinates are read). Every mode clamps
/// into the admissible mean interval.
///
///  * constant:   phi_i = clamp(c) for all i.
///  * finite_dim: phi_i = clamp(0) for i < d, clamp(phi(x_1..x_d)) after —
///    the limit of the running mean becomes a function of the first d
///    draws.
///  * oscillating: the prefix as above; for i >= d the target flips
///    between the clamped bounds following the block schedule,
///    phi_i = lo(x) + (hi(x) - lo(x)) * epsilon_i, so the running mean
///    visits both bounds infinitely often.
class TargetSequence {
 public:
  enum class Mode { kConstant, kFiniteDim, kOscillating };

  static TargetSequence constant(double c, MeanFunctional m);
  static TargetSequence finite_dim(TestFunction phi, MeanFunctional m);
  static TargetSequence oscillating(TestFunction lo, TestFunction hi,
                                    OscillationSchedule schedule,
                                    MeanFunctional m);

  Mode mode() const { return mode_; }
  /// Number of leading draws the targets depend on (0 for constant mode).
  int arity() const;
  const MeanFunctional& interval() const { return interval_; }
  /// The target used while i < arity().
  double prefix_value() const;
  /// Index from which the target stream is settled (finite_dim) — the
  /// step whose target equals the limit of the running mean.
  std::int64_t limit_index() const { return arity(); }

  /// phi_i given the realized prefix. xs must hold at least min(i, arity)
  /// values. Throws ContractViolation if an oscillating pair is ordered
  /// the wrong way at the evaluation point, or if i exceeds the schedule.
  double eval(std::int64_t i, std::span<const double> xs) const;

 private:
  TargetSequence(Mode mode, MeanFunctional m) : mode_(mode), interval_(m) {}

  Mode mode_;
  MeanFunctional interval_;
  double constant_value_ = 0.0;
  std::optional<TestFunction> phi_;
  std::optional<TestFunction> phi_hi_;
  std::optional<OscillationSchedule> schedule_;
};

/// Factories with the argument spelling used by configs.
TargetSequence make_finite_dim_targets(TestFunction phi, MeanFunctional m);
TargetSequence make_oscillating_targets(TestFunction lo, TestFunction hi,
                                        OscillationSchedule schedule,
                                        MeanFunctional m);

}  // namespace sublex
