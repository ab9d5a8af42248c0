#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sublex/ambiguity_set.hpp"
#include "sublex/nested.hpp"
#include "sublex/test_function.hpp"

namespace sublex {

/// Parsed form of one ambiguity member.
struct MemberSpec {
  enum class Kind { kAtoms, kUniform, kGaussian };
  Kind kind = Kind::kGaussian;
  std::vector<Atom> atoms;      // kAtoms
  double a = 0.0, b = 1.0;      // kUniform
  double mean = 0.0, sd = 1.0;  // kGaussian
};

/// Parsed form of a named function: targets, integrands, Choquet maps.
/// Forms:
///   constant    {value}
///   coordinate  {index >= 1}   f(x) = x_index, arity = index
///   polynomial  {arity, terms: [{coeff, powers[arity]}]}
///   tanh_poly   tanh of a polynomial (bounded)
///   abs_poly    |polynomial|
struct FunctionSpec {
  enum class Form { kConstant, kCoordinate, kPolynomial, kTanhPoly, kAbsPoly };
  struct Term {
    double coeff = 0.0;
    std::vector<int> powers;
  };
  Form form = Form::kConstant;
  int arity = 1;
  double value = 0.0;  // kConstant
  int index = 1;       // kCoordinate
  std::vector<Term> terms;
};

/// The validated experiment configuration. Parsing rejects unknown keys,
/// enforces per-mode required fields and checks value ranges, naming the
/// offending field in the ConfigError. `canonical_json` is the sorted-key,
/// whitespace-free serialization that digests and report embedding use.
struct ExperimentConfig {
  std::string mode;  // expect | choquet | simulate | cluster | schedule | acceptance
  std::vector<MemberSpec> members;

  std::optional<FunctionSpec> function;   // expect / choquet
  std::optional<FunctionSpec> target;     // simulate (steering)
  std::optional<FunctionSpec> target_lo;  // cluster
  std::optional<FunctionSpec> target_hi;  // cluster
  std::optional<int> baseline_member;     // simulate (i.i.d. reference)

  int num_blocks = 0;             // cluster / schedule
  double cluster_lo_max = 0.0;    // cluster verdict thresholds
  double cluster_hi_min = 0.0;
  std::int64_t n = 0;             // simulate; for cluster defaults to the
                                  // schedule length when omitted
  std::int64_t num_seeds = 1;
  std::uint64_t master_seed = 0;
  double tol = 0.02;
  double tail_fraction = 0.5;
  double quota = 1.0;
  int threads = 0;

  double quad_tol = 1e-9;
  GridSpec grid;

  bool emit_csv = false;
  std::int64_t stride = 1000;
  std::string out_dir = "out";

  std::string canonical_json;
};

/// Parse + validate a JSON config text, applying `overrides` (dotted-path
/// "key=value" pairs, e.g. "n=50000" or "grid.nodes_per_axis=129") before
/// validation. Throws ConfigError with the offending path on any problem.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::vector<std::string>& overrides = {});

/// Same, reading the file at `path`.
ExperimentConfig load_config_file(const std::string& path,
                                  const std::vector<std::string>& overrides = {});

/// Builders from validated specs to domain objects.
Distribution build_member(const MemberSpec& spec);
AmbiguitySet build_family(const ExperimentConfig& cfg);
TestFunction build_function(const FunctionSpec& spec);

/// FNV-1a 64-bit content hash, rendered as "fnv1a64:<16 hex digits>".
/// Used for config and payload digests; collision resistance is not a
/// goal, run-to-run identity is.
std::string content_digest(std::string_view bytes);

}  // namespace sublex
