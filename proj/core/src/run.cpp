#include "sublex/run.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sublex/acceptance.hpp"
#include "sublex/choquet.hpp"
#include "sublex/config.hpp"
#include "sublex/errors.hpp"
#include "sublex/nested.hpp"
#include "sublex/report.hpp"
#include "sublex/simulate.hpp"
#include "sublex/steering.hpp"
#include "sublex/sublinear.hpp"
#include "sublex/version.hpp"

namespace sublex {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerdict = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::int64_t paths = 0;
  bool emit_csv = false;

  CLI::Option* out_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* paths_opt = nullptr;
  CLI::Option* csv_opt = nullptr;

  /// --set pairs first, then the sugar flags, in a fixed order so the
  /// recorded override list (and hence the report) is reproducible.
  std::vector<std::string> overrides() const {
    std::vector<std::string> all = sets;
    if (out_opt && out_opt->count() > 0) all.push_back("out_dir=" + out_dir);
    if (seed_opt && seed_opt->count() > 0) {
      all.push_back("master_seed=" + std::to_string(seed));
    }
    if (paths_opt && paths_opt->count() > 0) {
      all.push_back("num_seeds=" + std::to_string(paths));
    }
    if (csv_opt && csv_opt->count() > 0) all.push_back("emit_csv=true");
    return all;
  }
};

void add_common_options(CLI::App* sub, CommonArgs& args, bool config_required) {
  CLI::Option* cfg = sub->add_option("--config", args.config_path,
                                     "JSON experiment configuration");
  if (config_required) cfg->required();
  sub->add_option("--set", args.sets,
                  "dotted-path override, e.g. --set n=50000 (repeatable)");
  args.out_opt =
      sub->add_option("--out", args.out_dir, "report/CSV output directory");
  args.seed_opt =
      sub->add_option("--seed", args.seed, "override the master seed");
  args.paths_opt =
      sub->add_option("--paths", args.paths, "override the number of seeds");
  args.csv_opt =
      sub->add_flag("--emit-csv", args.emit_csv, "write per-path CSV series");
}

struct RunOutcome {
  std::string payload_json;
  std::string verdict;  // "pass" | "fail" | "n/a"
  int exit_code = kExitPass;
};

// --- expect ------------------------------------------------------------
RunOutcome run_expect(const ExperimentConfig& cfg) {
  const AmbiguitySet family = build_family(cfg);
  const TestFunction f = build_function(*cfg.function);

  double upper = 0.0, lower = 0.0;
  if (f.arity() == 1) {
    upper = upper_expectation(family, f, cfg.quad_tol);
    lower = lower_expectation(family, f, cfg.quad_tol);
  } else {
    upper = nested_expectation(family, f, cfg.grid);
    lower = -nested_expectation(family, f.negated(), cfg.grid);
  }
  const auto mi = family.mean_interval();

  json payload;
  payload["mode"] = "expect";
  payload["arity"] = f.arity();
  payload["upper"] = upper;
  payload["lower"] = lower;
  payload["mean_interval"] = {{"lower", mi.first}, {"upper", mi.second}};

  std::cout << "upper expectation: " << upper << "\n"
            << "lower expectation: " << lower << "\n";
  return {payload.dump(), "n/a", kExitPass};
}

// --- choquet -----------------------------------------------------------
RunOutcome run_choquet(const ExperimentConfig& cfg) {
  const AmbiguitySet family = build_family(cfg);
  const TestFunction f = build_function(*cfg.function);
  ChoquetOptions opts;
  opts.tol = cfg.quad_tol;  // the validated choquet_tol
  opts.scan_nodes = cfg.grid.nodes_per_axis;
  const ChoquetBreakdown b = choquet_upper(family, f, opts);

  json payload;
  payload["mode"] = "choquet";
  payload["value"] = b.value;
  payload["positive_part"] = b.positive_part;
  payload["negative_part"] = b.negative_part;
  payload["tol"] = opts.tol;
  payload["scan_nodes"] = opts.scan_nodes;

  std::cout << "choquet integral (upper capacity): " << b.value << "\n";
  return {payload.dump(), "n/a", kExitPass};
}

// --- simulate / cluster --------------------------------------------------
RunOutcome run_paths(const ExperimentConfig& cfg) {
  ExperimentSpec spec;
  spec.family = build_family(cfg);
  const auto mi = spec.family->mean_interval();
  const MeanFunctional interval{mi.first, mi.second};

  if (cfg.mode == "cluster") {
    spec.kind = ExperimentKind::kCluster;
    const OscillationSchedule schedule = oscillation_schedule(cfg.num_blocks);
    spec.n = cfg.n > 0 ? cfg.n : schedule.total_length();
    if (spec.n > schedule.total_length()) {
      throw ConfigError(
          "n: exceeds the oscillation schedule length " +
          std::to_string(schedule.total_length()) + " of num_blocks=" +
          std::to_string(cfg.num_blocks));
    }
    spec.targets = make_oscillating_targets(build_function(*cfg.target_lo),
                                            build_function(*cfg.target_hi),
                                            schedule, interval);
    spec.cluster_lo_max = cfg.cluster_lo_max;
    spec.cluster_hi_min = cfg.cluster_hi_min;
  } else if (cfg.target.has_value()) {
    spec.kind = ExperimentKind::kSteer;
    spec.n = cfg.n;
    if (cfg.target->form == FunctionSpec::Form::kConstant) {
      spec.targets = TargetSequence::constant(cfg.target->value, interval);
    } else {
      spec.targets =
          make_finite_dim_targets(build_function(*cfg.target), interval);
    }
  } else {
    spec.kind = ExperimentKind::kBaseline;
    spec.n = cfg.n;
    spec.baseline_member = static_cast<std::size_t>(*cfg.baseline_member);
  }

  spec.num_seeds = cfg.num_seeds;
  spec.master_seed = cfg.master_seed;
  spec.tol = cfg.tol;
  spec.tail_fraction = cfg.tail_fraction;
  spec.quota = cfg.quota;
  spec.threads = cfg.threads;

  std::function<void(std::size_t, const Path&)> observer;
  if (cfg.emit_csv) {
    const fs::path dir = cfg.out_dir;
    const std::int64_t stride = cfg.stride;
    fs::create_directories(dir);
    observer = [dir, stride](std::size_t idx, const Path& p) {
      emit_path_csv(dir, idx, p, stride);
    };
  }

  const ExperimentReport report = run_experiment(spec, observer);
  std::cout << "seeds passed: " << report.pass_count << "/" << cfg.num_seeds
            << " (quota " << report.quota << ")\n";

  const bool pass = report.aggregate_pass;
  return {experiment_payload_json(report), pass ? "pass" : "fail",
          pass ? kExitPass : kExitVerdict};
}

// --- schedule ------------------------------------------------------------
RunOutcome run_schedule(const ExperimentConfig& cfg) {
  const std::int64_t cap = cfg.n > 0 ? cfg.n : (std::int64_t{1} << 62);
  const OscillationSchedule s = oscillation_schedule(cfg.num_blocks, cap);

  json blocks = json::array();
  for (int k = 1; k <= s.num_blocks(); ++k) {
    const std::int64_t end = s.block_end(k);
    const std::int64_t ones = s.ones_up_to(end);
    json b;
    b["k"] = k;
    b["length"] = s.block_length(k);
    b["end"] = end;
    b["value"] = OscillationSchedule::block_value(k);
    b["ones_at_end"] = ones;
    b["mean_at_end"] =
        static_cast<double>(ones) / static_cast<double>(end);
    blocks.push_back(std::move(b));
  }
  json payload;
  payload["mode"] = "schedule";
  payload["num_blocks"] = s.num_blocks();
  payload["total_length"] = s.total_length();
  payload["blocks"] = std::move(blocks);

  std::cout << "schedule: " << s.num_blocks() << " blocks, total length "
            << s.total_length() << "\n";
  return {payload.dump(), "n/a", kExitPass};
}

// --- acceptance ------------------------------------------------------------
RunOutcome run_acceptance_mode(const ExperimentConfig&) {
  const std::vector<CriterionResult> results = run_acceptance(std::cout);
  const bool pass = all_passed(results);
  std::cout << (pass ? "acceptance: all criteria passed\n"
                     : "acceptance: FAILED\n");
  return {acceptance_payload_json(results), pass ? "pass" : "fail",
          pass ? kExitPass : kExitVerdict};
}

int dispatch(const std::string& mode, const CommonArgs& args) {
  const std::vector<std::string> overrides = args.overrides();
  const ExperimentConfig cfg =
      args.config_path.empty()
          ? parse_config("{\"mode\":\"" + mode + "\"}", overrides)
          : load_config_file(args.config_path, overrides);
  if (cfg.mode != mode) {
    throw ConfigError("mode: config says '" + cfg.mode + "' but the '" + mode +
                      "' subcommand was invoked");
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  if (mode == "expect") {
    out = run_expect(cfg);
  } else if (mode == "choquet") {
    out = run_choquet(cfg);
  } else if (mode == "simulate" || mode == "cluster") {
    out = run_paths(cfg);
  } else if (mode == "schedule") {
    out = run_schedule(cfg);
  } else {
    out = run_acceptance_mode(cfg);
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();

  const ReportEnvelope envelope = make_envelope(
      cfg.canonical_json, out.payload_json, out.verdict, wall_ms, overrides);
  const fs::path report_path = fs::path(cfg.out_dir) / "report.json";
  write_text_atomic(report_path, envelope_to_json(envelope));
  std::cout << "report: " << report_path.string() << "\n";
  if (out.verdict != "n/a") std::cout << "verdict: " << out.verdict << "\n";
  return out.exit_code;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{
      "finite ambiguity sets: upper/lower expectations, Choquet integrals "
      "and steered-limit simulation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    bool config_required;
  };
  const Sub subs[] = {
      {"expect", "upper/lower (nested) expectation of a function", true},
      {"choquet", "Choquet integral against the upper capacity", true},
      {"simulate", "steer running means to a target, or run baselines", true},
      {"cluster", "steer running means to sweep a cluster interval", true},
      {"schedule", "print the factorial oscillation block schedule", true},
      {"acceptance", "run the acceptance gate", false},
  };

  std::vector<std::unique_ptr<CommonArgs>> arg_blocks;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    arg_blocks.push_back(std::make_unique<CommonArgs>());
    add_common_options(sub, *arg_blocks.back(), s.config_required);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (std::size_t i = 0; i < std::size(subs); ++i) {
      if (app.got_subcommand(subs[i].name)) {
        return dispatch(subs[i].name, *arg_blocks[i]);
      }
    }
    std::cerr << "error: no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace sublex
