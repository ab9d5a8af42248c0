#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublex/simulate.hpp"

namespace sublex {

/// The wrapper every CLI run writes: versioning and digests around a
/// mode-specific payload. `payload_json` is canonical (sorted keys, no
/// whitespace) and `payload_digest` covers exactly those bytes, so equal
/// digests mean byte-identical payloads. Timestamps and wall-clock live
/// outside the digested payload on purpose: reruns of the same config and
/// master seed must reproduce the digest bit-for-bit.
struct ReportEnvelope {
  std::string version;
  std::string config_digest;
  std::string config_json;  // canonical effective config (post-overrides)
  std::string timestamp_utc;
  std::vector<std::string> overrides;
  std::string payload_json;
  std::string payload_digest;
  std::string verdict;  // "pass" | "fail" | "n/a"
  double wall_ms = 0.0;
};

/// Assembles the envelope: digests are recomputed from the two canonical
/// JSON strings, the timestamp is the current UTC time (ISO 8601).
ReportEnvelope make_envelope(const std::string& config_json,
                             const std::string& payload_json,
                             const std::string& verdict, double wall_ms,
                             std::vector<std::string> overrides);

/// Full report document (pretty-printed JSON).
std::string envelope_to_json(const ReportEnvelope& e);

/// Write-to-temp-then-rename so readers never observe a torn report.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text);

/// Serialize an experiment report as a canonical payload object
/// (per-seed records keyed by path index, aggregate verdict, quota).
/// wall-clock time is deliberately omitted.
std::string experiment_payload_json(const ExperimentReport& report);

/// Per-seed CSV series, thinned to every `stride`-th step plus the final
/// one (a stride beyond n yields the single final row). Columns:
/// n,x,target,running_mean,residual. Files land in dir/path_<index>.csv.
void emit_path_csv(const std::filesystem::path& dir, std::size_t path_index,
                   const Path& path, std::int64_t stride);

}  // namespace sublex
