#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sublex/ambiguity_set.hpp"
#include "sublex/steering.hpp"

namespace sublex {

/// One simulated trajectory. xs[k] is draw x_{k+1}; targets[k] is the
/// target value phi_k it was steered towards; running_mean[k] is the
/// compensated partial mean of x_1..x_{k+1}.
struct Path {
  std::uint64_t seed = 0;
  std::vector<double> xs;
  std::vector<double> targets;
  std::vector<double> running_mean;

  std::int64_t n() const { return static_cast<std::int64_t>(xs.size()); }
};

/// Run the adapted mixture kernel along `targets` for n steps with the
/// given (already derived) rng seed.
Path simulate_path(const AmbiguitySet& a, const TargetSequence& targets,
                   std::int64_t n, std::uint64_t seed);

/// I.i.d. draws from one member — the no-steering reference trajectory.
/// Each step consumes two uniforms like simulate_path does, so baseline
/// and steered runs with equal seeds stay draw-aligned.
Path baseline_path(const AmbiguitySet& a, std::size_t member_index,
                   std::int64_t n, std::uint64_t seed);

/// r_k = (1/(k+1)) * sum_{j<=k} (xs[j] - targets[j]): the per-step average
/// of the centred increments. Identically equal to running_mean minus the
/// target partial mean.
std::vector<double> martingale_residuals(const Path& p);

/// (min, max) of the running mean over the trailing window of the path:
/// steps ceil((1 - tail_fraction) * n) .. n, 1-based.
std::pair<double, double> estimate_cluster_set(const Path& p,
                                               double tail_fraction);

/// Largest |running_mean - limit| over the trailing window.
double sup_tail_deviation(const Path& p, double limit, double tail_fraction);

/// sup_tail_deviation(p, limit, tail_fraction) <= tol.
bool convergence_verdict(const Path& p, double limit, double tol,
                         double tail_fraction);

// ---------------------------------------------------------------------------
// Conditional-mean calibration: bucket steps by target value and compare
// bucketed means of x against the targets they were steered to.
// ---------------------------------------------------------------------------

/// Per-path partial sums, mergeable deterministically across paths.
struct CalibrationAccumulator {
  std::vector<std::int64_t> count;
  std::vector<double> sum_target;
  std::vector<double> sum_x;
  std::vector<double> sum_diff;   // x - target
  std::vector<double> sum_diff2;  // (x - target)^2

  explicit CalibrationAccumulator(int buckets = 0)
      : count(buckets, 0),
        sum_target(buckets, 0.0),
        sum_x(buckets, 0.0),
        sum_diff(buckets, 0.0),
        sum_diff2(buckets, 0.0) {}

  int buckets() const { return static_cast<int>(count.size()); }
  void add_path(const Path& p, const MeanFunctional& interval);
  void merge(const CalibrationAccumulator& other);
};

struct CalibrationBucket {
  int index = 0;
  std::int64_t count = 0;
  double target_mean = 0.0;
  double x_mean = 0.0;
  double diff_mean = 0.0;
  double diff_se = 0.0;
  bool pass = true;
};

/// Buckets with fewer than min_count samples are skipped; the others pass
/// when |mean(x - target)| <= se_multiplier * se(x - target).
std::vector<CalibrationBucket> calibration_buckets(
    const CalibrationAccumulator& acc, double se_multiplier = 4.0,
    std::int64_t min_count = 10);

// ---------------------------------------------------------------------------
// Multi-seed experiments
// ---------------------------------------------------------------------------

enum class ExperimentKind { kSteer, kCluster, kBaseline };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSteer;
  std::optional<AmbiguitySet> family;
  std::optional<TargetSequence> targets;   // kSteer / kCluster
  std::size_t baseline_member = 0;         // kBaseline
  std::int64_t n = 0;
  std::int64_t num_seeds = 1;
  std::uint64_t master_seed = 0;
  double tol = 0.02;            // kSteer / kBaseline verdicts
  double tail_fraction = 0.5;   // trailing window for all verdicts
  double quota = 1.0;           // required per-seed pass rate
  double cluster_lo_max = 0.0;  // kCluster: min must reach down to this
  double cluster_hi_min = 0.0;  // kCluster: max must reach up to this
  int threads = 0;              // 0 = hardware concurrency
};

struct SeedRecord {
  std::uint64_t path_index = 0;
  std::uint64_t derived_seed = 0;
  double target_limit = 0.0;  // NaN for cluster runs
  double final_running_mean = 0.0;
  double sup_deviation = 0.0;  // NaN for cluster runs
  double cluster_min = 0.0;
  double cluster_max = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::vector<SeedRecord> seeds;
  std::int64_t pass_count = 0;
  double pass_rate = 0.0;
  double quota = 0.0;
  bool aggregate_pass = false;
  double wall_ms = 0.0;  // not part of any digest
};

/// Runs num_seeds independent paths (path_index 0..num_seeds-1, per-path
/// seed = derive_path_seed(master_seed, path_index)) across a thread pool.
/// Results are keyed by path index, so the report is identical whatever
/// the thread count. The optional observer is invoked once per finished
/// path (concurrently; keyed writes only) before the path is discarded.
ExperimentReport run_experiment(
    const ExperimentSpec& spec,
    const std::function<void(std::size_t, const Path&)>& observer = {});

}  // namespace sublex
