#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sublex/config.hpp"
#include "sublex/errors.hpp"
#include "sublex/report.hpp"
#include "sublex/rng.hpp"

using namespace sublex;

namespace {

const char* kSimulateConfig = R"json({
  "mode": "simulate",
  "ambiguity": {"members": [
    {"kind": "gaussian", "mean": -1.0, "sd": 1.0},
    {"kind": "gaussian", "mean": 1.0, "sd": 1.0}
  ]},
  "target": {"form": "constant", "value": 0.25},
  "n": 1000
})json";

const char* kExpectConfig = R"json({
  "mode": "expect",
  "ambiguity": {"members": [{"kind": "uniform", "a": 0.0, "b": 1.0}]},
  "function": {"form": "coordinate", "index": 1}
})json";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("config: a minimal simulate config parses with its defaults") {
  const ExperimentConfig cfg = parse_config(kSimulateConfig);
  CHECK(cfg.mode == "simulate");
  CHECK(cfg.members.size() == 2);
  CHECK(cfg.target.has_value());
  CHECK_FALSE(cfg.baseline_member.has_value());
  CHECK(cfg.n == 1000);
  CHECK(cfg.num_seeds == 1);
  CHECK(cfg.master_seed == 0);
  CHECK(cfg.tol == 0.02);
  CHECK(cfg.tail_fraction == 0.5);
  CHECK(cfg.quota == 1.0);
  CHECK(cfg.threads == 0);
  CHECK_FALSE(cfg.emit_csv);
  CHECK(cfg.stride == 1000);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.quad_tol == 1e-9);
  CHECK(cfg.grid.nodes_per_axis == 65);

  // Canonicalization is idempotent, so digests are stable round trips.
  const ExperimentConfig again = parse_config(cfg.canonical_json);
  CHECK(again.canonical_json == cfg.canonical_json);
  CHECK(content_digest(again.canonical_json) ==
        content_digest(cfg.canonical_json));
}

TEST_CASE("config: unknown keys are rejected with their full path") {
  nlohmann::json root = nlohmann::json::parse(kSimulateConfig);
  root["bogus"] = 1;
  CHECK_THROWS_WITH_AS(parse_config(root.dump()), "bogus: unknown key",
                       ConfigError);

  root = nlohmann::json::parse(kSimulateConfig);
  root["ambiguity"]["members"][0]["scale"] = 2.0;
  CHECK_THROWS_WITH_AS(parse_config(root.dump()),
                       "ambiguity.members[0].scale: unknown key", ConfigError);
}

TEST_CASE("config: missing required keys name the field") {
  CHECK_THROWS_WITH_AS(parse_config("{}"), ".mode: required key missing",
                       ConfigError);
  nlohmann::json root = nlohmann::json::parse(kSimulateConfig);
  root.erase("n");
  CHECK_THROWS_WITH_AS(parse_config(root.dump()), ".n: required key missing",
                       ConfigError);
  root = nlohmann::json::parse(kSimulateConfig);
  root["ambiguity"]["members"][0].erase("sd");
  CHECK_THROWS_WITH_AS(parse_config(root.dump()),
                       "ambiguity.members[0].sd: required key missing",
                       ConfigError);
}

TEST_CASE("config: range violations name the offending field") {
  nlohmann::json root = nlohmann::json::parse(kSimulateConfig);
  root["ambiguity"]["members"][0]["sd"] = 0.0;
  CHECK_THROWS_WITH_AS(parse_config(root.dump()),
                       "ambiguity.members[0].sd: must be > 0", ConfigError);

  root = nlohmann::json::parse(kSimulateConfig);
  root["tail_fraction"] = 0.0;
  CHECK_THROWS_WITH_AS(parse_config(root.dump()),
                       "tail_fraction: must lie in (0, 1]", ConfigError);

  root = nlohmann::json::parse(kSimulateConfig);
  root["quota"] = 1.5;
  CHECK_THROWS_WITH_AS(parse_config(root.dump()), "quota: must lie in [0, 1]",
                       ConfigError);

  root = nlohmann::json::parse(kSimulateConfig);
  root["n"] = 0;
  CHECK_THROWS_WITH_AS(parse_config(root.dump()), "n: must be >= 1",
                       ConfigError);

  root = nlohmann::json::parse(kSimulateConfig);
  root["ambiguity"]["members"][0] = {{"kind", "uniform"}, {"a", 2.0},
                                     {"b", 1.0}};
  CHECK_THROWS_WITH_AS(parse_config(root.dump()),
                       "ambiguity.members[0]: requires a < b", ConfigError);
}

TEST_CASE("config: simulate needs exactly one of target and baseline") {
  nlohmann::json root = nlohmann::json::parse(kSimulateConfig);
  root["baseline_member"] = 0;
  CHECK_THROWS_WITH_AS(
      parse_config(root.dump()),
      "target: simulate needs exactly one of: target, baseline_member",
      ConfigError);
  root.erase("target");
  root["baseline_member"] = 7;
  CHECK_THROWS_WITH_AS(parse_config(root.dump()),
                       "baseline_member: member index out of range",
                       ConfigError);
  root["baseline_member"] = 1;
  const ExperimentConfig cfg = parse_config(root.dump());
  CHECK(cfg.baseline_member == 1);
  CHECK_FALSE(cfg.target.has_value());
}

TEST_CASE("config: malformed documents are rejected") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2, 3]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mode": "teleport"})"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config: overrides rewrite dotted paths before validation") {
  const ExperimentConfig cfg = parse_config(
      kSimulateConfig,
      {"n=5000", "master_seed=42", "target.value=0.7", "emit_csv=true",
       "out_dir=runs"});
  CHECK(cfg.n == 5000);
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.target->value == 0.7);
  CHECK(cfg.emit_csv);
  CHECK(cfg.out_dir == "runs");  // non-JSON values fall back to strings

  const ExperimentConfig grid = parse_config(
      kExpectConfig, {"grid.nodes_per_axis=129", "quad_tol=1e-7"});
  CHECK(grid.grid.nodes_per_axis == 129);
  CHECK(grid.quad_tol == 1e-7);

  CHECK_THROWS_AS(parse_config(kSimulateConfig, {"noequals"}), ConfigError);
  CHECK_THROWS_AS(parse_config(kSimulateConfig, {"=5"}), ConfigError);
  // Overrides land before validation, so unknown keys still get caught.
  CHECK_THROWS_WITH_AS(parse_config(kSimulateConfig, {"bogus=1"}),
                       "bogus: unknown key", ConfigError);
}

TEST_CASE("config: choquet mode insists on an arity-1 function") {
  const char* base = R"json({
    "mode": "choquet",
    "ambiguity": {"members": [{"kind": "uniform", "a": 0.0, "b": 1.0}]},
    "function": {"form": "polynomial", "arity": 2,
                 "terms": [{"coeff": 1.0, "powers": [1, 1]}]}
  })json";
  CHECK_THROWS_WITH_AS(parse_config(base),
                       "function.arity: choquet requires an arity-1 function",
                       ConfigError);
  // scan_nodes has a documented floor.
  const ExperimentConfig cfg = parse_config(
      base, {"function.arity=1", "function.terms.0.powers=[2]"});
  CHECK(cfg.grid.nodes_per_axis == 2049);  // choquet scan default
  CHECK(cfg.quad_tol == 1e-6);             // choquet tolerance default
  CHECK_THROWS_WITH_AS(
      parse_config(base, {"function.arity=1", "function.terms.0.powers=[2]",
                          "scan_nodes=5"}),
      "scan_nodes: must lie in [17, 2^22]", ConfigError);
}

TEST_CASE("config: built functions evaluate their parsed forms") {
  FunctionSpec poly;
  poly.form = FunctionSpec::Form::kPolynomial;
  poly.arity = 2;
  poly.terms = {{2.0, {2, 1}}, {-1.0, {0, 0}}};  // 2 x1^2 x2 - 1
  const TestFunction f = build_function(poly);
  CHECK(f.arity() == 2);
  const double xs[] = {3.0, 4.0};
  CHECK(f(std::span<const double>(xs, 2)) == 71.0);
  CHECK_FALSE(f.bounded());
  CHECK(f.growth_m() == 2);  // degree 3 monomial

  poly.form = FunctionSpec::Form::kTanhPoly;
  const TestFunction t = build_function(poly);
  CHECK(t(std::span<const double>(xs, 2)) == std::tanh(71.0));
  CHECK(t.bounded());

  poly.form = FunctionSpec::Form::kAbsPoly;
  poly.terms = {{-1.0, {1, 0}}};  // |-x1|
  const TestFunction a = build_function(poly);
  CHECK(a(std::span<const double>(xs, 2)) == 3.0);

  FunctionSpec coord;
  coord.form = FunctionSpec::Form::kCoordinate;
  coord.index = 2;
  coord.arity = 2;
  CHECK(build_function(coord)(std::span<const double>(xs, 2)) == 4.0);

  // The declared growth envelopes hold up under random spot checks.
  Rng rng(314u);
  CHECK(f.spot_check_growth(rng));
  CHECK(t.spot_check_growth(rng));
  CHECK(a.spot_check_growth(rng));
}

TEST_CASE("config: atom members are sorted before construction") {
  MemberSpec spec;
  spec.kind = MemberSpec::Kind::kAtoms;
  spec.atoms = {{1.0, 0.5}, {0.0, 0.5}};  // given out of order
  const Distribution d = build_member(spec);
  CHECK(d.mean() == 0.5);

  spec.atoms = {{0.0, 0.5}, {1.0, 0.6}};  // weights exceed 1
  CHECK_THROWS_AS(build_member(spec), ConfigError);
}

TEST_CASE("digest: frozen value and sensitivity") {
  // FNV-1a, 64-bit: offset basis 14695981039346656037, prime 1099511628211.
  // "abc" folds to e71fa2190541574b; the empty string leaves the basis.
  CHECK(content_digest("abc") == "fnv1a64:e71fa2190541574b");
  CHECK(content_digest("") == "fnv1a64:cbf29ce484222325");
  CHECK(content_digest("abc") != content_digest("abd"));
  CHECK(content_digest("abc") == content_digest("abc"));
}

TEST_CASE("report: envelopes digest exactly the canonical strings") {
  const std::string config = R"({"mode":"schedule","num_blocks":3})";
  const std::string payload = R"({"blocks":[1,2,6]})";
  const ReportEnvelope e =
      make_envelope(config, payload, "pass", 12.5, {"num_blocks=3"});
  CHECK(e.config_digest == content_digest(config));
  CHECK(e.payload_digest == content_digest(payload));
  CHECK(e.verdict == "pass");
  CHECK(e.wall_ms == 12.5);
  REQUIRE(e.overrides.size() == 1);
  CHECK(e.overrides[0] == "num_blocks=3");
  CHECK_FALSE(e.version.empty());
  // ISO 8601 UTC: YYYY-MM-DDTHH:MM:SSZ.
  REQUIRE(e.timestamp_utc.size() == 20);
  CHECK(e.timestamp_utc[4] == '-');
  CHECK(e.timestamp_utc[10] == 'T');
  CHECK(e.timestamp_utc.back() == 'Z');

  const nlohmann::json doc = nlohmann::json::parse(envelope_to_json(e));
  CHECK(doc["config"]["mode"] == "schedule");
  CHECK(doc["payload"]["blocks"].size() == 3);
  CHECK(doc["config_digest"] == e.config_digest);
  CHECK(doc["payload_digest"] == e.payload_digest);
  CHECK(doc["verdict"] == "pass");
}

TEST_CASE("report: experiment payloads render NaN as null") {
  ExperimentReport report;
  SeedRecord rec;
  rec.path_index = 0;
  rec.derived_seed = 99u;
  rec.target_limit = std::numeric_limits<double>::quiet_NaN();
  rec.sup_deviation = std::numeric_limits<double>::quiet_NaN();
  rec.final_running_mean = 0.25;
  rec.cluster_min = 0.1;
  rec.cluster_max = 0.9;
  rec.pass = true;
  report.seeds = {rec};
  report.pass_count = 1;
  report.pass_rate = 1.0;
  report.quota = 1.0;
  report.aggregate_pass = true;

  const std::string payload = experiment_payload_json(report);
  const nlohmann::json doc = nlohmann::json::parse(payload);
  CHECK(doc["seeds"][0]["target_limit"].is_null());
  CHECK(doc["seeds"][0]["sup_deviation"].is_null());
  CHECK(doc["seeds"][0]["final_running_mean"] == 0.25);
  CHECK(doc["seeds"][0]["derived_seed"] == 99);
  CHECK(doc["aggregate_pass"] == true);
  // The payload itself is canonical: re-serializing changes nothing.
  CHECK(doc.dump() == payload);
}

TEST_CASE("report: atomic writes land complete and tmp-free") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "sublex_report_test";
  std::filesystem::remove_all(dir);
  const std::filesystem::path file = dir / "sub" / "note.txt";
  write_text_atomic(file, "first\n");
  CHECK(read_file(file) == "first\n");
  write_text_atomic(file, "second\n");  // overwrite via rename
  CHECK(read_file(file) == "second\n");
  CHECK_FALSE(std::filesystem::exists(file.string() + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("report: CSV thinning keeps every stride-th row plus the final") {
  Path p;
  const std::int64_t n = 10;
  for (std::int64_t i = 1; i <= n; ++i) {
    p.xs.push_back(static_cast<double>(i));
    p.targets.push_back(0.0);
    p.running_mean.push_back(static_cast<double>(i + 1) / 2.0);
  }
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "sublex_csv_test";
  std::filesystem::remove_all(dir);

  emit_path_csv(dir, 3, p, 3);  // rows 3, 6, 9 and the partial final 10
  const std::string thinned = read_file(dir / "path_3.csv");
  CHECK(count_lines(thinned) == 5);
  CHECK(thinned.rfind("n,x,target,running_mean,residual\n", 0) == 0);
  CHECK(thinned.find("\n10,") != std::string::npos);

  emit_path_csv(dir, 4, p, 5);  // n divides evenly: no duplicate final row
  CHECK(count_lines(read_file(dir / "path_4.csv")) == 3);

  emit_path_csv(dir, 5, p, 100);  // stride beyond n: single final row
  const std::string single = read_file(dir / "path_5.csv");
  CHECK(count_lines(single) == 2);
  CHECK(single.find("\n10,") != std::string::npos);

  // Residual column equals running mean here (all targets are zero).
  std::istringstream rows(single);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  CHECK(row == "10,10,0,5.5,5.5");

  std::filesystem::remove_all(dir);
}
