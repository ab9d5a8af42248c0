#include "sublex/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <span>
#include <sstream>

#include <json.hpp>

#include "sublex/errors.hpp"

namespace sublex {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required key missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

double finite_number(const json& v, const std::string& path) {
  const double x = as_number(v, path);
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
  if (!(v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

MemberSpec parse_member(const json& m, const std::string& path) {
  if (!m.is_object()) fail(path, "expected an object");
  MemberSpec spec;
  const std::string kind = as_string(require(m, "kind", path), path + ".kind");
  if (kind == "atoms") {
    spec.kind = MemberSpec::Kind::kAtoms;
    check_keys(m, path, {"kind", "points"});
    const json& pts = require(m, "points", path);
    if (!pts.is_array() || pts.empty()) {
      fail(path + ".points", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string ppath = path + ".points[" + std::to_string(i) + "]";
      if (!pts[i].is_object()) fail(ppath, "expected an object");
      check_keys(pts[i], ppath, {"x", "w"});
      Atom a;
      a.point = finite_number(require(pts[i], "x", ppath), ppath + ".x");
      a.weight = finite_number(require(pts[i], "w", ppath), ppath + ".w");
      if (!(a.weight > 0.0)) fail(ppath + ".w", "must be > 0");
      spec.atoms.push_back(a);
    }
  } else if (kind == "uniform") {
    spec.kind = MemberSpec::Kind::kUniform;
    check_keys(m, path, {"kind", "a", "b"});
    spec.a = finite_number(require(m, "a", path), path + ".a");
    spec.b = finite_number(require(m, "b", path), path + ".b");
    if (!(spec.a < spec.b)) fail(path, "requires a < b");
  } else if (kind == "gaussian") {
    spec.kind = MemberSpec::Kind::kGaussian;
    check_keys(m, path, {"kind", "mean", "sd"});
    spec.mean = finite_number(require(m, "mean", path), path + ".mean");
    spec.sd = finite_number(require(m, "sd", path), path + ".sd");
    if (!(spec.sd > 0.0)) fail(path + ".sd", "must be > 0");
  } else {
    fail(path + ".kind", "expected one of: atoms, uniform, gaussian");
  }
  return spec;
}

FunctionSpec parse_function(const json& f, const std::string& path) {
  if (!f.is_object()) fail(path, "expected an object");
  FunctionSpec spec;
  const std::string form = as_string(require(f, "form", path), path + ".form");
  if (form == "constant") {
    spec.form = FunctionSpec::Form::kConstant;
    check_keys(f, path, {"form", "value"});
    spec.value = finite_number(require(f, "value", path), path + ".value");
    spec.arity = 1;
    return spec;
  }
  if (form == "coordinate") {
    spec.form = FunctionSpec::Form::kCoordinate;
    check_keys(f, path, {"form", "index"});
    const std::int64_t idx = as_int(require(f, "index", path), path + ".index");
    if (idx < 1 || idx > 16) fail(path + ".index", "must lie in [1, 16]");
    spec.index = static_cast<int>(idx);
    spec.arity = spec.index;
    return spec;
  }
  if (form == "polynomial") {
    spec.form = FunctionSpec::Form::kPolynomial;
  } else if (form == "tanh_poly") {
    spec.form = FunctionSpec::Form::kTanhPoly;
  } else if (form == "abs_poly") {
    spec.form = FunctionSpec::Form::kAbsPoly;
  } else {
    fail(path + ".form",
         "expected one of: constant, coordinate, polynomial, tanh_poly, "
         "abs_poly");
  }
  check_keys(f, path, {"form", "arity", "terms"});
  const std::int64_t arity = as_int(require(f, "arity", path), path + ".arity");
  if (arity < 1 || arity > 16) fail(path + ".arity", "must lie in [1, 16]");
  spec.arity = static_cast<int>(arity);
  const json& terms = require(f, "terms", path);
  if (!terms.is_array() || terms.empty()) {
    fail(path + ".terms", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tpath = path + ".terms[" + std::to_string(i) + "]";
    if (!terms[i].is_object()) fail(tpath, "expected an object");
    check_keys(terms[i], tpath, {"coeff", "powers"});
    FunctionSpec::Term term;
    term.coeff = finite_number(require(terms[i], "coeff", tpath), tpath + ".coeff");
    const json& powers = require(terms[i], "powers", tpath);
    if (!powers.is_array() ||
        powers.size() != static_cast<std::size_t>(spec.arity)) {
      fail(tpath + ".powers", "expected an array of length arity");
    }
    for (std::size_t j = 0; j < powers.size(); ++j) {
      const std::int64_t p =
          as_int(powers[j], tpath + ".powers[" + std::to_string(j) + "]");
      if (p < 0 || p > 12) {
        fail(tpath + ".powers[" + std::to_string(j) + "]",
             "must lie in [0, 12]");
      }
      term.powers.push_back(static_cast<int>(p));
    }
    spec.terms.push_back(std::move(term));
  }
  return spec;
}

void apply_override(json& root, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + kv + "' is not of the form key=value");
  }
  std::string key = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);
  for (char& c : key) {
    if (c == '.') c = '/';
  }
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // plain string value
  }
  try {
    root[json::json_pointer("/" + key)] = parsed;
  } catch (const json::exception& e) {
    throw ConfigError("override '" + kv + "': " + e.what());
  }
}

std::set<std::string> allowed_top_keys(const std::string& mode) {
  if (mode == "expect") {
    return {"mode", "ambiguity", "function", "quad_tol", "grid", "out_dir"};
  }
  if (mode == "choquet") {
    return {"mode", "ambiguity", "function", "choquet_tol", "scan_nodes",
            "out_dir"};
  }
  if (mode == "simulate") {
    return {"mode", "ambiguity", "target", "baseline_member", "n",
            "num_seeds", "master_seed", "tol", "tail_fraction", "quota",
            "threads", "emit_csv", "stride", "out_dir"};
  }
  if (mode == "cluster") {
    return {"mode", "ambiguity", "target_lo", "target_hi", "num_blocks", "n",
            "num_seeds", "master_seed", "tail_fraction", "quota",
            "cluster_lo_max", "cluster_hi_min", "threads", "emit_csv",
            "stride", "out_dir"};
  }
  if (mode == "schedule") {
    return {"mode", "num_blocks", "max_path_length", "out_dir"};
  }
  if (mode == "acceptance") {
    return {"mode", "out_dir"};
  }
  throw ConfigError(
      "mode: expected one of: expect, choquet, simulate, cluster, schedule, "
      "acceptance");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text,
                              const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  for (const std::string& kv : overrides) apply_override(root, kv);

  ExperimentConfig cfg;
  cfg.mode = as_string(require(root, "mode", ""), "mode");
  check_keys(root, "", allowed_top_keys(cfg.mode));

  const bool wants_family =
      cfg.mode == "expect" || cfg.mode == "choquet" || cfg.mode == "simulate" ||
      cfg.mode == "cluster";
  if (wants_family) {
    const json& amb = require(root, "ambiguity", "");
    if (!amb.is_object()) fail("ambiguity", "expected an object");
    check_keys(amb, "ambiguity", {"members"});
    const json& members = require(amb, "members", "ambiguity");
    if (!members.is_array() || members.empty()) {
      fail("ambiguity.members", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      cfg.members.push_back(parse_member(
          members[i], "ambiguity.members[" + std::to_string(i) + "]"));
    }
  }

  if (cfg.mode == "expect" || cfg.mode == "choquet") {
    cfg.function = parse_function(require(root, "function", ""), "function");
    if (cfg.mode == "choquet" && cfg.function->arity != 1) {
      fail("function.arity", "choquet requires an arity-1 function");
    }
  }

  if (root.contains("quad_tol")) {
    cfg.quad_tol = finite_number(root["quad_tol"], "quad_tol");
    if (!(cfg.quad_tol > 0.0)) fail("quad_tol", "must be > 0");
  }
  if (cfg.mode == "choquet") {
    if (root.contains("choquet_tol")) {
      const double t = finite_number(root["choquet_tol"], "choquet_tol");
      if (!(t > 0.0)) fail("choquet_tol", "must be > 0");
      cfg.quad_tol = t;
    } else {
      cfg.quad_tol = 1e-6;
    }
    if (root.contains("scan_nodes")) {
      const std::int64_t s = as_int(root["scan_nodes"], "scan_nodes");
      if (s < 17 || s > 1 << 22) fail("scan_nodes", "must lie in [17, 2^22]");
      cfg.grid.nodes_per_axis = static_cast<int>(s);
    } else {
      cfg.grid.nodes_per_axis = 2049;
    }
  }
  if (root.contains("grid")) {
    const json& g = root["grid"];
    if (!g.is_object()) fail("grid", "expected an object");
    check_keys(g, "grid", {"nodes_per_axis", "richardson_tol"});
    if (g.contains("nodes_per_axis")) {
      const std::int64_t n = as_int(g["nodes_per_axis"], "grid.nodes_per_axis");
      if (n < 3 || n > 4097) fail("grid.nodes_per_axis", "must lie in [3, 4097]");
      cfg.grid.nodes_per_axis = static_cast<int>(n);
    }
    if (g.contains("richardson_tol")) {
      cfg.grid.richardson_tol =
          finite_number(g["richardson_tol"], "grid.richardson_tol");
      if (!(cfg.grid.richardson_tol > 0.0)) {
        fail("grid.richardson_tol", "must be > 0");
      }
    }
  }
  cfg.grid.quad_tol = cfg.quad_tol;

  if (cfg.mode == "simulate") {
    const bool has_target = root.contains("target");
    const bool has_baseline = root.contains("baseline_member");
    if (has_target == has_baseline) {
      fail("target", "simulate needs exactly one of: target, baseline_member");
    }
    if (has_target) {
      cfg.target = parse_function(root["target"], "target");
    } else {
      const std::int64_t m = as_int(root["baseline_member"], "baseline_member");
      if (m < 0 || m >= static_cast<std::int64_t>(cfg.members.size())) {
        fail("baseline_member", "member index out of range");
      }
      cfg.baseline_member = static_cast<int>(m);
    }
    cfg.n = as_int(require(root, "n", ""), "n");
    if (cfg.n < 1) fail("n", "must be >= 1");
  }

  if (cfg.mode == "cluster") {
    cfg.target_lo = parse_function(require(root, "target_lo", ""), "target_lo");
    cfg.target_hi = parse_function(require(root, "target_hi", ""), "target_hi");
    if (cfg.target_lo->arity != cfg.target_hi->arity) {
      fail("target_hi.arity", "must match target_lo.arity");
    }
    const std::int64_t blocks = as_int(require(root, "num_blocks", ""), "num_blocks");
    if (blocks < 1 || blocks > 20) fail("num_blocks", "must lie in [1, 20]");
    cfg.num_blocks = static_cast<int>(blocks);
    cfg.cluster_lo_max =
        finite_number(require(root, "cluster_lo_max", ""), "cluster_lo_max");
    cfg.cluster_hi_min =
        finite_number(require(root, "cluster_hi_min", ""), "cluster_hi_min");
    if (root.contains("n")) {
      cfg.n = as_int(root["n"], "n");
      if (cfg.n < 1) fail("n", "must be >= 1");
    }
  }

  if (cfg.mode == "schedule") {
    const std::int64_t blocks = as_int(require(root, "num_blocks", ""), "num_blocks");
    if (blocks < 1) fail("num_blocks", "must be >= 1");
    cfg.num_blocks = static_cast<int>(std::min<std::int64_t>(blocks, 1 << 20));
  }
  if (root.contains("max_path_length")) {
    const std::int64_t cap = as_int(root["max_path_length"], "max_path_length");
    if (cap < 1) fail("max_path_length", "must be >= 1");
    cfg.n = cap;  // schedule mode reuses n as the feasibility cap
  }

  if (cfg.mode == "simulate" || cfg.mode == "cluster") {
    if (root.contains("num_seeds")) {
      cfg.num_seeds = as_int(root["num_seeds"], "num_seeds");
      if (cfg.num_seeds < 1 || cfg.num_seeds > 65536) {
        fail("num_seeds", "must lie in [1, 65536]");
      }
    }
    if (root.contains("master_seed")) {
      cfg.master_seed = as_uint(root["master_seed"], "master_seed");
    }
    if (root.contains("tol")) {
      cfg.tol = finite_number(root["tol"], "tol");
      if (!(cfg.tol > 0.0)) fail("tol", "must be > 0");
    }
    if (root.contains("tail_fraction")) {
      cfg.tail_fraction = finite_number(root["tail_fraction"], "tail_fraction");
      if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0)) {
        fail("tail_fraction", "must lie in (0, 1]");
      }
    }
    if (root.contains("quota")) {
      cfg.quota = finite_number(root["quota"], "quota");
      if (!(cfg.quota >= 0.0 && cfg.quota <= 1.0)) {
        fail("quota", "must lie in [0, 1]");
      }
    }
    if (root.contains("threads")) {
      const std::int64_t t = as_int(root["threads"], "threads");
      if (t < 0 || t > 4096) fail("threads", "must lie in [0, 4096]");
      cfg.threads = static_cast<int>(t);
    }
    if (root.contains("emit_csv")) {
      cfg.emit_csv = as_bool(root["emit_csv"], "emit_csv");
    }
    if (root.contains("stride")) {
      cfg.stride = as_int(root["stride"], "stride");
      if (cfg.stride < 1) fail("stride", "must be >= 1");
    }
  }
  if (root.contains("out_dir")) {
    cfg.out_dir = as_string(root["out_dir"], "out_dir");
    if (cfg.out_dir.empty()) fail("out_dir", "must not be empty");
  }

  cfg.canonical_json = root.dump();  // nlohmann objects iterate sorted by key
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path,
                                  const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

Distribution build_member(const MemberSpec& spec) {
  switch (spec.kind) {
    case MemberSpec::Kind::kAtoms: {
      std::vector<Atom> pts = spec.atoms;
      std::sort(pts.begin(), pts.end(),
                [](const Atom& a, const Atom& b) { return a.point < b.point; });
      return Distribution::atoms(std::move(pts));
    }
    case MemberSpec::Kind::kUniform:
      return Distribution::uniform(spec.a, spec.b);
    case MemberSpec::Kind::kGaussian:
      return Distribution::gaussian(spec.mean, spec.sd);
  }
  throw ConfigError("unreachable member kind");
}

AmbiguitySet build_family(const ExperimentConfig& cfg) {
  std::vector<Distribution> members;
  members.reserve(cfg.members.size());
  for (const MemberSpec& m : cfg.members) members.push_back(build_member(m));
  return AmbiguitySet(std::move(members));
}

namespace {

double eval_poly(const FunctionSpec& spec, std::span<const double> xs) {
  double s = 0.0;
  for (const FunctionSpec::Term& t : spec.terms) {
    double v = t.coeff;
    for (std::size_t j = 0; j < t.powers.size(); ++j) {
      for (int p = 0; p < t.powers[j]; ++p) v *= xs[j];
    }
    s += v;
  }
  return s;
}

}  // namespace

TestFunction build_function(const FunctionSpec& spec) {
  switch (spec.form) {
    case FunctionSpec::Form::kConstant:
      return TestFunction::constant(spec.value);
    case FunctionSpec::Form::kCoordinate: {
      const int idx = spec.index;
      return TestFunction(
          spec.arity,
          [idx](std::span<const double> xs) { return xs[idx - 1]; }, 1.0, 0,
          false);
    }
    case FunctionSpec::Form::kPolynomial:
    case FunctionSpec::Form::kTanhPoly:
    case FunctionSpec::Form::kAbsPoly:
      break;
  }

  // Shared growth declaration of the polynomial core: for a degree-k
  // monomial, |x^a - y^a| <= k sqrt(d) (1 + |x|^(k-1) + |y|^(k-1)) |x - y|,
  // so C adds |coeff| * max(1, k) * sqrt(d) per term. tanh is a
  // 1-Lipschitz wrapper and |.| changes nothing.
  double growth_c = 0.0;
  int max_deg = 0;
  for (const FunctionSpec::Term& t : spec.terms) {
    int deg = 0;
    for (int p : t.powers) deg += p;
    max_deg = std::max(max_deg, deg);
    growth_c += std::abs(t.coeff) * std::max(1, deg) *
                std::sqrt(static_cast<double>(spec.arity));
  }
  const int growth_m = std::max(0, max_deg - 1);

  const FunctionSpec copy = spec;
  switch (spec.form) {
    case FunctionSpec::Form::kPolynomial:
      return TestFunction(
          spec.arity,
          [copy](std::span<const double> xs) { return eval_poly(copy, xs); },
          growth_c, growth_m, max_deg == 0);
    case FunctionSpec::Form::kTanhPoly:
      return TestFunction(
          spec.arity,
          [copy](std::span<const double> xs) {
            return std::tanh(eval_poly(copy, xs));
          },
          growth_c, growth_m, true);
    case FunctionSpec::Form::kAbsPoly:
      return TestFunction(
          spec.arity,
          [copy](std::span<const double> xs) {
            return std::abs(eval_poly(copy, xs));
          },
          growth_c, growth_m, max_deg == 0);
    default:
      throw ConfigError("unreachable function form");
  }
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;  // FNV offset basis
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;  // FNV prime
  }
  static const char* hex = "0123456789abcdef";
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) {
    out.push_back(hex[(h >> shift) & 0xF]);
  }
  return out;
}

}  // namespace sublex
