#include "sublex/steering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sublex/errors.hpp"

namespace sublex {

double clamp_to_interval(double y, const MeanFunctional& m) {
  return std::max(m.mu_lower, std::min(y, m.mu_upper));
}

double mixture_weight(double target, const MeanFunctional& m) {
  if (m.mu_upper == m.mu_lower) return 1.0;  // degenerate interval
  if (!(target >= m.mu_lower && target <= m.mu_upper)) {
    throw ContractViolation("mixture weight: target " + std::to_string(target) +
                            " outside mean interval [" +
                            std::to_string(m.mu_lower) + ", " +
                            std::to_string(m.mu_upper) + "]");
  }
  return (target - m.mu_lower) / (m.mu_upper - m.mu_lower);
}

MixtureKernel::MixtureKernel(ExtremalPair pair, MeanFunctional interval)
    : pair_(std::move(pair)), interval_(interval) {
  if (!(interval_.mu_lower <= interval_.mu_upper)) {
    throw ConfigError("mixture kernel: mean interval is inverted");
  }
}

double MixtureKernel::weight_of(double target) const {
  return mixture_weight(target, interval_);
}

double MixtureKernel::sample(double target, Rng& rng) const {
  const double w = weight_of(target);
  // Bernoulli(w) via one uniform: u < w picks the max-mean member. At
  // w == 1 this always fires (u < 1 by construction); at w == 0 never.
  const bool pick_upper = rng.next_u01() < w;
  return pick_upper ? pair_.p_upper.sample(rng) : pair_.p_lower.sample(rng);
}

OscillationSchedule OscillationSchedule::with_blocks(int num_blocks,
                                                     std::int64_t max_length) {
  if (num_blocks < 1) {
    throw ConfigError("oscillation schedule needs at least one block");
  }
  OscillationSchedule s;
  std::int64_t t = 0;
  for (int k = 1; k <= num_blocks; ++k) {
    // L_k = (k-1) * T_{k-1}; guard the multiply before running it so the
    // overflow check itself cannot overflow.
    const bool too_long =
        (k == 1) ? (max_length < 1)
                 : (t > (max_length - t) / static_cast<std::int64_t>(k - 1));
    if (too_long) {
      throw ScheduleOverflowError(
          "oscillation schedule: " + std::to_string(num_blocks) +
              " blocks would need " + std::to_string(k) +
              "! steps, beyond the maximum path length " +
              std::to_string(max_length) + "; at most " +
              std::to_string(k - 1) + " blocks fit",
          k - 1);
    }
    t += (k == 1) ? 1 : (k - 1) * t;
    s.block_end_.push_back(t);
  }
  return s;
}

std::int64_t OscillationSchedule::block_length(int k) const {
  if (k < 1 || k > num_blocks()) {
    throw ContractViolation("block index out of range");
  }
  return k == 1 ? 1 : block_end_[k - 1] - block_end_[k - 2];
}

std::int64_t OscillationSchedule::block_end(int k) const {
  if (k < 1 || k > num_blocks()) {
    throw ContractViolation("block index out of range");
  }
  return block_end_[k - 1];
}

int OscillationSchedule::epsilon(std::int64_t i) const {
  if (i < 1 || i > total_length()) {
    throw ContractViolation("schedule index " + std::to_string(i) +
                            " outside [1, " + std::to_string(total_length()) +
                            "]");
  }
  // First block whose end reaches i.
  const auto it = std::lower_bound(block_end_.begin(), block_end_.end(), i);
  const int k = static_cast<int>(it - block_end_.begin()) + 1;
  return block_value(k);
}

std::int64_t OscillationSchedule::ones_up_to(std::int64_t n) const {
  if (n < 0 || n > total_length()) {
    throw ContractViolation("schedule prefix length out of range");
  }
  std::int64_t ones = 0;
  std::int64_t prev_end = 0;
  for (int k = 1; k <= num_blocks() && prev_end < n; ++k) {
    const std::int64_t end = std::min(block_end_[k - 1], n);
    if (block_value(k) == 1) ones += end - prev_end;
    prev_end = block_end_[k - 1];
  }
  return ones;
}

OscillationSchedule oscillation_schedule(int num_blocks,
                                         std::int64_t max_length) {
  return OscillationSchedule::with_blocks(num_blocks, max_length);
}

TargetSequence TargetSequence::constant(double c, MeanFunctional m) {
  TargetSequence t(Mode::kConstant, m);
  t.constant_value_ = clamp_to_interval(c, m);
  return t;
}

TargetSequence TargetSequence::finite_dim(TestFunction phi, MeanFunctional m) {
  TargetSequence t(Mode::kFiniteDim, m);
  t.phi_ = std::move(phi);
  return t;
}

TargetSequence TargetSequence::oscillating(TestFunction lo, TestFunction hi,
                                           OscillationSchedule schedule,
                                           MeanFunctional m) {
  if (lo.arity() != hi.arity()) {
    throw ConfigError("oscillating targets: bounds must share an arity");
  }
  TargetSequence t(Mode::kOscillating, m);
  t.phi_ = std::move(lo);
  t.phi_hi_ = std::move(hi);
  t.schedule_ = std::move(schedule);
  return t;
}

int TargetSequence::arity() const {
  return mode_ == Mode::kConstant ? 0 : phi_->arity();
}

double TargetSequence::prefix_value() const {
  return mode_ == Mode::kConstant ? constant_value_
                                  : clamp_to_interval(0.0, interval_);
}

double TargetSequence::eval(std::int64_t i, std::span<const double> xs) const {
  if (mode_ == Mode::kConstant) return constant_value_;
  const int d = phi_->arity();
  if (i < d) return clamp_to_interval(0.0, interval_);
  if (xs.size() < static_cast<std::size_t>(d)) {
    throw ContractViolation("target eval: prefix shorter than target arity");
  }
  const std::span<const double> head = xs.first(static_cast<std::size_t>(d));
  if (mode_ == Mode::kFiniteDim) {
    return clamp_to_interval((*phi_)(head), interval_);
  }
  // Oscillating: flip between the clamped bounds along the block schedule.
  const double lo = clamp_to_interval((*phi_)(head), interval_);
  const double hi = clamp_to_interval((*phi_hi_)(head), interval_);
  if (lo > hi) {
    throw ContractViolation(
        "oscillating targets: lower bound " + std::to_string(lo) +
        " exceeds upper bound " + std::to_string(hi) + " on the realized path");
  }
  return lo + (hi - lo) * schedule_->epsilon(i);
}

TargetSequence make_finite_dim_targets(TestFunction phi, MeanFunctional m) {
  return TargetSequence::finite_dim(std::move(phi), m);
}

TargetSequence make_oscillating_targets(TestFunction lo, TestFunction hi,
                                        OscillationSchedule schedule,
                                        MeanFunctional m) {
  return TargetSequence::oscillating(std::move(lo), std::move(hi),
                                     std::move(schedule), m);
}

}  // namespace sublex
