#include "sublex/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sublex/errors.hpp"
#include "sublex/rng.hpp"

namespace sublex {

namespace {

std::int64_t window_start(std::int64_t n, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ContractViolation("tail fraction must lie in (0, 1]");
  }
  const auto start = static_cast<std::int64_t>(
      std::ceil((1.0 - tail_fraction) * static_cast<double>(n)));
  return std::max<std::int64_t>(start, 1);
}

}  // namespace

Path simulate_path(const AmbiguitySet& a, const TargetSequence& targets,
                   std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw ContractViolation("path length must be >= 1");
  const MixtureKernel kernel(extremal_pair(a),
                             MeanFunctional{a.mean_interval().first,
                                            a.mean_interval().second});
  Path p;
  p.seed = seed;
  p.xs.reserve(n);
  p.targets.reserve(n);
  p.running_mean.reserve(n);

  Rng rng(seed);
  CompensatedSum sum;
  for (std::int64_t i = 0; i < n; ++i) {
    const double phi = targets.eval(i, p.xs);
    const double x = kernel.sample(phi, rng);
    p.targets.push_back(phi);
    p.xs.push_back(x);
    sum.add(x);
    p.running_mean.push_back(sum.value() / static_cast<double>(i + 1));
  }
  return p;
}

Path baseline_path(const AmbiguitySet& a, std::size_t member_index,
                   std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw ContractViolation("path length must be >= 1");
  if (member_index >= a.size()) {
    throw ContractViolation("baseline member index out of range");
  }
  const Distribution& member = a.members()[member_index];
  const double mean = member.mean();

  Path p;
  p.seed = seed;
  p.xs.reserve(n);
  p.targets.reserve(n);
  p.running_mean.reserve(n);

  Rng rng(seed);
  CompensatedSum sum;
  for (std::int64_t i = 0; i < n; ++i) {
    rng.next_u01();  // keep draw alignment with simulate_path's Bernoulli
    const double x = member.sample(rng);
    p.targets.push_back(mean);
    p.xs.push_back(x);
    sum.add(x);
    p.running_mean.push_back(sum.value() / static_cast<double>(i + 1));
  }
  return p;
}

std::vector<double> martingale_residuals(const Path& p) {
  std::vector<double> r;
  r.reserve(p.xs.size());
  CompensatedSum sum;
  for (std::size_t k = 0; k < p.xs.size(); ++k) {
    sum.add(p.xs[k] - p.targets[k]);
    r.push_back(sum.value() / static_cast<double>(k + 1));
  }
  return r;
}

std::pair<double, double> estimate_cluster_set(const Path& p,
                                               double tail_fraction) {
  const std::int64_t start = window_start(p.n(), tail_fraction);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = start; k <= p.n(); ++k) {
    const double m = p.running_mean[k - 1];
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return {lo, hi};
}

double sup_tail_deviation(const Path& p, double limit, double tail_fraction) {
  const std::int64_t start = window_start(p.n(), tail_fraction);
  double worst = 0.0;
  for (std::int64_t k = start; k <= p.n(); ++k) {
    worst = std::max(worst, std::abs(p.running_mean[k - 1] - limit));
  }
  return worst;
}

bool convergence_verdict(const Path& p, double limit, double tol,
                         double tail_fraction) {
  return sup_tail_deviation(p, limit, tail_fraction) <= tol;
}

void CalibrationAccumulator::add_path(const Path& p,
                                      const MeanFunctional& interval) {
  const int b = buckets();
  if (b == 0) return;
  const double lo = interval.mu_lower;
  const double span = interval.mu_upper - interval.mu_lower;
  for (std::size_t k = 0; k < p.xs.size(); ++k) {
    int idx = 0;
    if (span > 0.0) {
      idx = static_cast<int>((p.targets[k] - lo) / span * b);
      idx = std::clamp(idx, 0, b - 1);
    }
    const double d = p.xs[k] - p.targets[k];
    count[idx] += 1;
    sum_target[idx] += p.targets[k];
    sum_x[idx] += p.xs[k];
    sum_diff[idx] += d;
    sum_diff2[idx] += d * d;
  }
}

void CalibrationAccumulator::merge(const CalibrationAccumulator& other) {
  if (other.buckets() != buckets()) {
    throw ContractViolation("cannot merge calibration accumulators of "
                            "different bucket counts");
  }
  for (int i = 0; i < buckets(); ++i) {
    count[i] += other.count[i];
    sum_target[i] += other.sum_target[i];
    sum_x[i] += other.sum_x[i];
    sum_diff[i] += other.sum_diff[i];
    sum_diff2[i] += other.sum_diff2[i];
  }
}

std::vector<CalibrationBucket> calibration_buckets(
    const CalibrationAccumulator& acc, double se_multiplier,
    std::int64_t min_count) {
  std::vector<CalibrationBucket> out;
  for (int i = 0; i < acc.buckets(); ++i) {
    if (acc.count[i] < min_count) continue;
    CalibrationBucket b;
    b.index = i;
    b.count = acc.count[i];
    const double n = static_cast<double>(b.count);
    b.target_mean = acc.sum_target[i] / n;
    b.x_mean = acc.sum_x[i] / n;
    b.diff_mean = acc.sum_diff[i] / n;
    const double var =
        std::max(0.0, acc.sum_diff2[i] / n - b.diff_mean * b.diff_mean);
    b.diff_se = std::sqrt(var / n);
    b.pass = std::abs(b.diff_mean) <= se_multiplier * b.diff_se;
    out.push_back(b);
  }
  return out;
}

ExperimentReport run_experiment(
    const ExperimentSpec& spec,
    const std::function<void(std::size_t, const Path&)>& observer) {
  if (!spec.family.has_value()) {
    throw ContractViolation("experiment spec has no ambiguity family");
  }
  if (spec.kind != ExperimentKind::kBaseline && !spec.targets.has_value()) {
    throw ContractViolation("experiment spec has no target sequence");
  }
  if (spec.num_seeds < 1) {
    throw ContractViolation("experiment needs at least one seed");
  }

  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.seeds.resize(spec.num_seeds);
  report.quota = spec.quota;

  auto run_one = [&](std::size_t idx) {
    const std::uint64_t seed = derive_path_seed(spec.master_seed, idx);
    Path path;
    double limit = std::numeric_limits<double>::quiet_NaN();
    switch (spec.kind) {
      case ExperimentKind::kSteer: {
        path = simulate_path(*spec.family, *spec.targets, spec.n, seed);
        const auto li =
            static_cast<std::size_t>(std::min<std::int64_t>(
                spec.targets->limit_index(), spec.n - 1));
        limit = path.targets[li];
        break;
      }
      case ExperimentKind::kCluster: {
        path = simulate_path(*spec.family, *spec.targets, spec.n, seed);
        break;
      }
      case ExperimentKind::kBaseline: {
        path = baseline_path(*spec.family, spec.baseline_member, spec.n, seed);
        limit = spec.family->members()[spec.baseline_member].mean();
        break;
      }
    }

    SeedRecord rec;
    rec.path_index = idx;
    rec.derived_seed = seed;
    rec.final_running_mean = path.running_mean.back();
    const auto [cmin, cmax] = estimate_cluster_set(path, spec.tail_fraction);
    rec.cluster_min = cmin;
    rec.cluster_max = cmax;
    if (spec.kind == ExperimentKind::kCluster) {
      rec.target_limit = std::numeric_limits<double>::quiet_NaN();
      rec.sup_deviation = std::numeric_limits<double>::quiet_NaN();
      rec.pass = cmin <= spec.cluster_lo_max && cmax >= spec.cluster_hi_min;
    } else {
      rec.target_limit = limit;
      rec.sup_deviation = sup_tail_deviation(path, limit, spec.tail_fraction);
      rec.pass = rec.sup_deviation <= spec.tol;
    }
    if (observer) observer(idx, path);
    report.seeds[idx] = rec;
  };

  const std::size_t total = static_cast<std::size_t>(spec.num_seeds);
  std::size_t workers =
      spec.threads > 0 ? static_cast<std::size_t>(spec.threads)
                       : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, total);

  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= total) return;
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard<std::mutex> lk(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (const SeedRecord& rec : report.seeds) {
    if (rec.pass) ++report.pass_count;
  }
  report.pass_rate =
      static_cast<double>(report.pass_count) / static_cast<double>(total);
  report.aggregate_pass = report.pass_rate >= spec.quota - 1e-12;
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

}  // namespace sublex
