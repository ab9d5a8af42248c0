#include "sublex/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "sublex/choquet.hpp"
#include "sublex/config.hpp"
#include "sublex/errors.hpp"
#include "sublex/nested.hpp"
#include "sublex/normal.hpp"
#include "sublex/quadrature.hpp"
#include "sublex/report.hpp"
#include "sublex/simulate.hpp"
#include "sublex/sublinear.hpp"

namespace sublex {

namespace {

// ---------------------------------------------------------------------------
// Pinned acceptance parameters. These are the gate; loosening them is a
// behaviour change, not a tuning knob.
// ---------------------------------------------------------------------------
constexpr double kAxiomTol = 1e-9;
constexpr int kAxiomTrials = 200;
constexpr int kAxiomFamilies = 5;
constexpr double kAxiomTimeLimit = 10.0;

constexpr double kNestedTol = 1e-12;
constexpr int kNestedTrials = 100;
constexpr double kNestedTimeLimit = 30.0;

constexpr double kChoquetTol = 1e-6;

constexpr double kTruncTol = 1e-8;

constexpr std::int64_t kSteerN = 200000;
constexpr std::int64_t kSteerSeeds = 32;
constexpr double kSteerTol = 0.02;
constexpr double kSteerTail = 0.5;
constexpr double kSteerQuota = 30.0 / 32.0;
constexpr double kSteerTimeLimit = 120.0;
constexpr std::uint64_t kSteerMasterSeed = 0x5EED0005u;

constexpr int kCalibBuckets = 20;
constexpr double kCalibSeMultiplier = 4.0;
constexpr std::int64_t kCalibMinCount = 100;
constexpr double kCalibPassShare = 0.95;

constexpr int kClusterBlocks = 9;  // schedule length 362880
constexpr std::int64_t kClusterSeeds = 8;
constexpr double kClusterTail = 0.95;
constexpr double kClusterLoMax = -0.75;
constexpr double kClusterHiMin = 0.75;
constexpr double kClusterTimeLimit = 120.0;
constexpr std::uint64_t kClusterMasterSeed = 0x5EED0007u;

constexpr int kScheduleBlocks = 10;
constexpr double kScheduleTimeLimit = 1.0;

constexpr std::int64_t kBaselineSeeds = 32;
constexpr std::uint64_t kBaselineMasterSeed = 0x5EED0009u;

// ---------------------------------------------------------------------------

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

AmbiguitySet gaussian_pair() {
  return AmbiguitySet({Distribution::gaussian(-1.0, 1.0),
                       Distribution::gaussian(1.0, 1.0)});
}

AmbiguitySet uniform_pair() {
  return AmbiguitySet({Distribution::uniform(0.0, 1.0),
                       Distribution::uniform(0.0, 2.0)});
}

AmbiguitySet two_point() {
  return AmbiguitySet({Distribution::point_mass(0.0),
                       Distribution::point_mass(1.0)});
}

AmbiguitySet mixed_symmetric() {
  return AmbiguitySet({Distribution::atoms({{-1.0, 0.5}, {1.0, 0.5}}),
                       Distribution::uniform(-1.0, 1.0),
                       Distribution::gaussian(0.0, 0.5)});
}

// Random bounded Lipschitz function: a two-term tanh mixture.
TestFunction random_tanh_mix(Rng& rng) {
  const double a1 = 2.0 * (2.0 * rng.next_u01() - 1.0);
  const double b1 = 2.0 * (2.0 * rng.next_u01() - 1.0);
  const double c1 = 2.0 * (2.0 * rng.next_u01() - 1.0);
  const double a2 = 2.0 * (2.0 * rng.next_u01() - 1.0);
  const double b2 = 2.0 * (2.0 * rng.next_u01() - 1.0);
  const double c2 = 2.0 * (2.0 * rng.next_u01() - 1.0);
  return TestFunction::scalar(
      [=](double x) {
        return a1 * std::tanh(b1 * x + c1) + a2 * std::tanh(b2 * x + c2);
      },
      std::abs(a1 * b1) + std::abs(a2 * b2) + 1e-6, 0, true);
}

// Random non-negative bounded Lipschitz bump.
TestFunction random_nonneg_bump(Rng& rng) {
  const double a = 1.5 * rng.next_u01();
  const double b = 2.0 * (2.0 * rng.next_u01() - 1.0);
  const double c = 2.0 * (2.0 * rng.next_u01() - 1.0);
  return TestFunction::scalar(
      [=](double x) { return a * (1.0 + std::tanh(b * x + c)); },
      std::abs(a * b) + 1e-6, 0, true);
}

AmbiguitySet random_family(Rng& rng) {
  const int count = 2 + static_cast<int>(rng.next_u01() * 3.0);
  std::vector<Distribution> members;
  for (int i = 0; i < count; ++i) {
    const double pick = rng.next_u01();
    if (pick < 1.0 / 3.0) {
      const double mean = 4.0 * rng.next_u01() - 2.0;
      const double sd = 0.3 + 1.7 * rng.next_u01();
      members.push_back(Distribution::gaussian(mean, sd));
    } else if (pick < 2.0 / 3.0) {
      const double a = -3.0 + 3.0 * rng.next_u01();
      const double b = a + 0.5 + 3.5 * rng.next_u01();
      members.push_back(Distribution::uniform(a, b));
    } else {
      const int pts = 2 + static_cast<int>(rng.next_u01() * 3.0);
      std::vector<Atom> atoms;
      double x = -3.0 + rng.next_u01();
      double wsum = 0.0;
      for (int j = 0; j < pts; ++j) {
        const double w = 0.1 + rng.next_u01();
        atoms.push_back({x, w});
        wsum += w;
        x += 0.25 + 2.0 * rng.next_u01();
      }
      for (Atom& at : atoms) at.weight /= wsum;
      members.push_back(Distribution::atoms(std::move(atoms)));
    }
  }
  return AmbiguitySet(std::move(members));
}

// Random atom-only family for the nested-expectation oracle duel.
AmbiguitySet random_atom_family(Rng& rng) {
  const int count = 2 + static_cast<int>(rng.next_u01() * 3.0);
  std::vector<Distribution> members;
  for (int i = 0; i < count; ++i) {
    const int pts = 2 + static_cast<int>(rng.next_u01() * 3.0);
    std::vector<Atom> atoms;
    double x = -2.0 + 0.5 * rng.next_u01();
    double wsum = 0.0;
    for (int j = 0; j < pts; ++j) {
      const double w = 0.1 + rng.next_u01();
      atoms.push_back({x, w});
      wsum += w;
      x += 0.2 + rng.next_u01();
    }
    for (Atom& at : atoms) at.weight /= wsum;
    members.push_back(Distribution::atoms(std::move(atoms)));
  }
  return AmbiguitySet(std::move(members));
}

FunctionSpec random_polynomial_spec(Rng& rng, int arity) {
  FunctionSpec spec;
  spec.form = FunctionSpec::Form::kPolynomial;
  spec.arity = arity;
  const int terms = 1 + static_cast<int>(rng.next_u01() * 4.0);
  for (int t = 0; t < terms; ++t) {
    FunctionSpec::Term term;
    term.coeff = 4.0 * rng.next_u01() - 2.0;
    for (int j = 0; j < arity; ++j) {
      term.powers.push_back(static_cast<int>(rng.next_u01() * 4.0));  // 0..3
    }
    spec.terms.push_back(std::move(term));
  }
  return spec;
}

// Independent brute-force recursive-max enumeration of the nested upper
// expectation over an all-atom family.
double nested_oracle(const AmbiguitySet& a, const TestFunction& f,
                     std::vector<double>& prefix) {
  if (static_cast<int>(prefix.size()) == f.arity()) return f(prefix);
  double best = -std::numeric_limits<double>::infinity();
  for (const Distribution& m : a.members()) {
    double s = 0.0;
    for (const Atom& at : *m.atom_points()) {
      prefix.push_back(at.point);
      s += at.weight * nested_oracle(a, f, prefix);
      prefix.pop_back();
    }
    best = std::max(best, s);
  }
  return best;
}

// The steering target of criteria 5/6: tanh(x1*x2 + x3).
FunctionSpec steer_target_spec() {
  FunctionSpec spec;
  spec.form = FunctionSpec::Form::kTanhPoly;
  spec.arity = 3;
  spec.terms.push_back({1.0, {1, 1, 0}});
  spec.terms.push_back({1.0, {0, 0, 1}});
  return spec;
}

ExperimentSpec steer_experiment_spec() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kSteer;
  spec.family = gaussian_pair();
  const auto mi = spec.family->mean_interval();
  spec.targets = make_finite_dim_targets(build_function(steer_target_spec()),
                                         MeanFunctional{mi.first, mi.second});
  spec.n = kSteerN;
  spec.num_seeds = kSteerSeeds;
  spec.master_seed = kSteerMasterSeed;
  spec.tol = kSteerTol;
  spec.tail_fraction = kSteerTail;
  spec.quota = kSteerQuota;
  return spec;
}

ExperimentSpec cluster_experiment_spec() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kCluster;
  spec.family = gaussian_pair();
  const auto mi = spec.family->mean_interval();
  const MeanFunctional interval{mi.first, mi.second};
  const OscillationSchedule schedule = oscillation_schedule(kClusterBlocks);
  spec.n = schedule.total_length();
  spec.targets =
      make_oscillating_targets(TestFunction::constant(-1.0),
                               TestFunction::constant(1.0), schedule, interval);
  spec.num_seeds = kClusterSeeds;
  spec.master_seed = kClusterMasterSeed;
  spec.tail_fraction = kClusterTail;
  spec.quota = 1.0;
  spec.cluster_lo_max = kClusterLoMax;
  spec.cluster_hi_min = kClusterHiMin;
  return spec;
}

struct Gate {
  std::ostream& log;
  std::vector<CriterionResult> results;

  void record(int id, const std::string& name, bool pass, double secs,
              const std::string& details) {
    results.push_back({id, name, pass, secs, details});
    log << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name
        << " — " << details << " (" << fmt(secs) << "s)\n";
  }
};

// --- criterion 1 -----------------------------------------------------------
void criterion_axioms(Gate& gate) {
  const auto t0 = Clock::now();
  Rng rng(0x5EED0001u);
  std::vector<AmbiguitySet> families;
  for (int i = 0; i < kAxiomFamilies; ++i) families.push_back(random_family(rng));

  int failures = 0;
  std::string first_failure;
  constexpr double quad_tol = 1e-11;
  for (int trial = 0; trial < kAxiomTrials; ++trial) {
    const AmbiguitySet& fam =
        families[static_cast<std::size_t>(rng.next_u01() * kAxiomFamilies) %
                 kAxiomFamilies];
    const TestFunction f = random_tanh_mix(rng);
    const TestFunction g = random_tanh_mix(rng);
    const TestFunction h = random_nonneg_bump(rng);
    const double lambda = 3.0 * rng.next_u01();
    const double c = 4.0 * rng.next_u01() - 2.0;

    const double sf = upper_expectation(fam, f, quad_tol);
    const double sg = upper_expectation(fam, g, quad_tol);
    auto check = [&](bool ok, const char* what) {
      if (!ok) {
        ++failures;
        if (first_failure.empty()) {
          first_failure = std::string(what) + " at trial " + std::to_string(trial);
        }
      }
    };

    // (a) monotonicity via f vs f + (non-negative bump)
    check(upper_expectation(fam, f.plus(h), quad_tol) >= sf - kAxiomTol,
          "monotonicity");
    // (b) constants are preserved
    check(std::abs(upper_expectation(fam, TestFunction::constant(c), quad_tol) -
                   c) <= kAxiomTol,
          "constant preservation");
    // (c) sub-additivity
    check(upper_expectation(fam, f.plus(g), quad_tol) <= sf + sg + kAxiomTol,
          "sub-additivity");
    // (d) positive homogeneity
    check(std::abs(upper_expectation(fam, f.scaled(lambda), quad_tol) -
                   lambda * sf) <= kAxiomTol * (1.0 + lambda),
          "positive homogeneity");
    // conjugacy must hold bit-for-bit, not within tolerance
    check(lower_expectation(fam, f, quad_tol) ==
              -upper_expectation(fam, f.negated(), quad_tol),
          "bit-exact conjugacy");
  }
  const double secs = seconds_since(t0);
  const bool pass = failures == 0 && secs < kAxiomTimeLimit;
  gate.record(1, "sublinear axiom suite", pass, secs,
              failures == 0
                  ? std::to_string(kAxiomTrials) + " trials x 5 families clean"
                  : std::to_string(failures) + " violations; first: " +
                        first_failure);
}

// --- criterion 2 -----------------------------------------------------------
void criterion_nested_oracle(Gate& gate) {
  const auto t0 = Clock::now();
  Rng rng(0x5EED0002u);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < kNestedTrials; ++trial) {
    const AmbiguitySet fam = random_atom_family(rng);
    const int arity = 1 + trial % 4;
    const TestFunction f = build_function(random_polynomial_spec(rng, arity));
    const double lib = nested_expectation(fam, f);
    std::vector<double> prefix;
    prefix.reserve(arity);
    const double oracle = nested_oracle(fam, f, prefix);
    const double diff = std::abs(lib - oracle);
    worst = std::max(worst, diff);
    if (!(diff <= kNestedTol)) ++failures;
  }
  const double secs = seconds_since(t0);
  const bool pass = failures == 0 && secs < kNestedTimeLimit;
  gate.record(2, "nested expectation vs brute-force oracle", pass, secs,
              std::to_string(kNestedTrials) +
                  " random polynomial targets, worst |diff| = " + fmt(worst));
}

// --- criterion 3 -----------------------------------------------------------
void criterion_choquet_closed_forms(Gate& gate) {
  const auto t0 = Clock::now();
  std::string details;
  bool pass = true;

  {  // identity map over the uniform pair: closed form 1
    FunctionSpec ident;
    ident.form = FunctionSpec::Form::kPolynomial;
    ident.arity = 1;
    ident.terms.push_back({1.0, {1}});
    const double got =
        choquet_upper(uniform_pair(), build_function(ident)).value;
    if (std::abs(got - 1.0) > kChoquetTol) pass = false;
    details += "identity: " + fmt(got) + " vs 1";
  }

  {  // |x| over the gaussian pair vs an independent tail-integral oracle
    FunctionSpec absf;
    absf.form = FunctionSpec::Form::kAbsPoly;
    absf.arity = 1;
    absf.terms.push_back({1.0, {1}});
    const double got =
        choquet_upper(gaussian_pair(), build_function(absf)).value;

    // Oracle: both members give P(|X| >= t) = tail(t-1) + tail(t+1), so the
    // upper level integral is a plain quadrature of that survival sum. The
    // closed form 2*pdf(1) + 2*cdf(1) - 1 pins the oracle itself.
    auto survival = [](double t) {
      return normal::tail(t - 1.0) + normal::tail(t + 1.0);
    };
    double oracle = 0.0;
    for (double lo = 0.0; lo < 64.0; lo += 4.0) {
      oracle += integrate(survival, lo, lo + 4.0, 1e-11).value;
    }
    const double closed_form =
        2.0 * normal::pdf(1.0) + (2.0 * normal::cdf(1.0) - 1.0);
    if (std::abs(oracle - closed_form) > 1e-9) pass = false;
    if (std::abs(got - oracle) > kChoquetTol) pass = false;
    details += "; |x|: " + fmt(got) + " vs oracle " + fmt(oracle);
  }

  gate.record(3, "choquet closed forms", pass, seconds_since(t0), details);
}

// --- criterion 4 -----------------------------------------------------------
void criterion_truncated_means(Gate& gate) {
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    AmbiguitySet fam;
  };
  const Case cases[] = {
      {"two_point", two_point()},
      {"uniform_pair", uniform_pair()},
      {"gaussian_pair", gaussian_pair()},
      {"mixed_symmetric", mixed_symmetric()},
  };
  bool pass = true;
  double worst = 0.0;
  for (const Case& c : cases) {
    const MeanFunctional m = truncated_mean_limit(c.fam);
    const auto mi = c.fam.mean_interval();
    const double diff = std::max(std::abs(m.mu_lower - mi.first),
                                 std::abs(m.mu_upper - mi.second));
    worst = std::max(worst, diff);
    if (!(diff <= kTruncTol)) pass = false;
  }
  gate.record(4, "truncated mean limits vs member extremes", pass,
              seconds_since(t0),
              "4 example families, worst |diff| = " + fmt(worst));
}

// --- criteria 5 & 6 --------------------------------------------------------
void criterion_steering_and_calibration(Gate& gate) {
  const auto t0 = Clock::now();
  const ExperimentSpec spec = steer_experiment_spec();
  const MeanFunctional interval = spec.targets->interval();

  std::vector<CalibrationAccumulator> slots(
      spec.num_seeds, CalibrationAccumulator(kCalibBuckets));
  auto observer = [&](std::size_t idx, const Path& p) {
    slots[idx].add_path(p, interval);
  };
  const ExperimentReport report = run_experiment(spec, observer);
  const double secs = seconds_since(t0);

  const bool pass5 = report.aggregate_pass && secs < kSteerTimeLimit;
  gate.record(5, "finite-dimensional steering", pass5, secs,
              std::to_string(report.pass_count) + "/" +
                  std::to_string(spec.num_seeds) +
                  " seeds within 0.02 of their realized limit");

  // Criterion 6 reuses the very same run.
  const auto t6 = Clock::now();
  CalibrationAccumulator merged(kCalibBuckets);
  for (const CalibrationAccumulator& acc : slots) merged.merge(acc);
  const std::vector<CalibrationBucket> buckets =
      calibration_buckets(merged, kCalibSeMultiplier, kCalibMinCount);
  std::size_t ok = 0;
  for (const CalibrationBucket& b : buckets) ok += b.pass ? 1 : 0;
  const bool pass6 =
      !buckets.empty() &&
      static_cast<double>(ok) >=
          kCalibPassShare * static_cast<double>(buckets.size());
  gate.record(6, "conditional-mean calibration", pass6, seconds_since(t6),
              std::to_string(ok) + "/" + std::to_string(buckets.size()) +
                  " populated buckets within 4 standard errors");
}

// --- criterion 7 -----------------------------------------------------------
void criterion_cluster_steering(Gate& gate) {
  const auto t0 = Clock::now();
  const ExperimentSpec spec = cluster_experiment_spec();
  const ExperimentReport report = run_experiment(spec);
  const double secs = seconds_since(t0);
  double worst_min = std::numeric_limits<double>::infinity();
  double worst_max = -std::numeric_limits<double>::infinity();
  for (const SeedRecord& r : report.seeds) {
    worst_min = std::min(worst_min, r.cluster_min);
    worst_max = std::max(worst_max, r.cluster_max);
  }
  const bool pass = report.aggregate_pass && secs < kClusterTimeLimit;
  gate.record(7, "oscillating cluster steering", pass, secs,
              std::to_string(report.pass_count) + "/" +
                  std::to_string(spec.num_seeds) +
                  " seeds swept [-0.75, 0.75]; extremes " + fmt(worst_min) +
                  " / " + fmt(worst_max));
}

// --- criterion 8 -----------------------------------------------------------
void criterion_schedule_invariants(Gate& gate) {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string details = "T_k = k! and block-end mean bounds, k <= 10";

  const OscillationSchedule s = oscillation_schedule(kScheduleBlocks);
  std::int64_t factorial = 1;
  for (int k = 1; k <= kScheduleBlocks; ++k) {
    factorial *= k;
    if (s.block_end(k) != factorial) pass = false;
    if (k >= 2 && s.block_length(k) != (k - 1) * (factorial / k)) pass = false;
    const std::int64_t ones = s.ones_up_to(s.block_end(k));
    //  odd k: mean >= (k-1)/k  <=>  ones * k >= (k-1) * T_k   (exact integers)
    // even k: mean <=     1/k  <=>  ones * k <= T_k
    if (k % 2 == 1) {
      if (ones * k < (k - 1) * factorial) pass = false;
    } else {
      if (ones * k > factorial) pass = false;
    }
  }

  // Overflow reporting must name the largest feasible block count.
  try {
    oscillation_schedule(9, /*max_length=*/40320);
    pass = false;
  } catch (const ScheduleOverflowError& e) {
    if (e.max_feasible_blocks() != 8) pass = false;
  }

  const double secs = seconds_since(t0);
  gate.record(8, "factorial block schedule invariants",
              pass && secs < kScheduleTimeLimit, secs, details);
}

// --- criterion 9 -----------------------------------------------------------
void criterion_baselines(Gate& gate) {
  const auto t0 = Clock::now();
  bool pass = true;
  std::int64_t passed = 0, total = 0;
  for (std::size_t member = 0; member < 2; ++member) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::kBaseline;
    spec.family = gaussian_pair();
    spec.baseline_member = member;
    spec.n = kSteerN;
    spec.num_seeds = kBaselineSeeds;
    spec.master_seed = kBaselineMasterSeed + member;
    spec.tol = kSteerTol;
    spec.tail_fraction = kSteerTail;
    spec.quota = 1.0;
    const ExperimentReport report = run_experiment(spec);
    passed += report.pass_count;
    total += spec.num_seeds;
    if (!report.aggregate_pass) pass = false;
  }
  gate.record(9, "i.i.d. baselines converge to member means", pass,
              seconds_since(t0),
              std::to_string(passed) + "/" + std::to_string(total) +
                  " seeds within 0.02 of the sampled member's mean");
}

// --- criterion 10 ----------------------------------------------------------
void criterion_reproducibility(Gate& gate) {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string details;

  auto digest_of = [](const ExperimentSpec& spec) {
    return content_digest(experiment_payload_json(run_experiment(spec)));
  };

  const std::string steer_a = digest_of(steer_experiment_spec());
  const std::string steer_b = digest_of(steer_experiment_spec());
  if (steer_a != steer_b) pass = false;
  details += "steer digest " + steer_a.substr(8, 8) +
             (steer_a == steer_b ? " stable" : " UNSTABLE");

  const std::string cluster_a = digest_of(cluster_experiment_spec());
  const std::string cluster_b = digest_of(cluster_experiment_spec());
  if (cluster_a != cluster_b) pass = false;
  details += "; cluster digest " + cluster_a.substr(8, 8) +
             (cluster_a == cluster_b ? " stable" : " UNSTABLE");

  gate.record(10, "byte-identical payload digests on rerun", pass,
              seconds_since(t0), details);
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log) {
  Gate gate{log, {}};
  criterion_axioms(gate);
  criterion_nested_oracle(gate);
  criterion_choquet_closed_forms(gate);
  criterion_truncated_means(gate);
  criterion_steering_and_calibration(gate);
  criterion_cluster_steering(gate);
  criterion_schedule_invariants(gate);
  criterion_baselines(gate);
  criterion_reproducibility(gate);
  return gate.results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    if (!r.pass) return false;
  }
  return !results.empty();
}

std::string acceptance_payload_json(
    const std::vector<CriterionResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CriterionResult& r : results) {
    nlohmann::json c;
    c["id"] = r.id;
    c["name"] = r.name;
    c["pass"] = r.pass;
    c["details"] = r.details;
    arr.push_back(std::move(c));
  }
  nlohmann::json payload;
  payload["criteria"] = std::move(arr);
  payload["all_pass"] = all_passed(results);
  return payload.dump();
}

}  // namespace sublex
