#include "sublex/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "sublex/config.hpp"
#include "sublex/errors.hpp"
#include "sublex/version.hpp"

namespace sublex {

namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

// NaN is not representable in JSON; report it as null.
json number_or_null(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

}  // namespace

ReportEnvelope make_envelope(const std::string& config_json,
                             const std::string& payload_json,
                             const std::string& verdict, double wall_ms,
                             std::vector<std::string> overrides) {
  ReportEnvelope e;
  e.version = kVersion;
  e.config_json = config_json;
  e.config_digest = content_digest(config_json);
  e.timestamp_utc = utc_timestamp();
  e.overrides = std::move(overrides);
  e.payload_json = payload_json;
  e.payload_digest = content_digest(payload_json);
  e.verdict = verdict;
  e.wall_ms = wall_ms;
  return e;
}

std::string envelope_to_json(const ReportEnvelope& e) {
  json doc;
  doc["version"] = e.version;
  doc["config_digest"] = e.config_digest;
  doc["config"] = json::parse(e.config_json);
  doc["timestamp_utc"] = e.timestamp_utc;
  doc["overrides"] = e.overrides;
  doc["payload"] = json::parse(e.payload_json);
  doc["payload_digest"] = e.payload_digest;
  doc["verdict"] = e.verdict;
  doc["wall_ms"] = e.wall_ms;
  return doc.dump(2) + "\n";
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? "."
                                          : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out.flush()) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string experiment_payload_json(const ExperimentReport& report) {
  json seeds = json::array();
  for (const SeedRecord& r : report.seeds) {
    json s;
    s["path_index"] = r.path_index;
    s["derived_seed"] = r.derived_seed;
    s["target_limit"] = number_or_null(r.target_limit);
    s["final_running_mean"] = r.final_running_mean;
    s["sup_deviation"] = number_or_null(r.sup_deviation);
    s["cluster_min"] = r.cluster_min;
    s["cluster_max"] = r.cluster_max;
    s["pass"] = r.pass;
    seeds.push_back(std::move(s));
  }
  json payload;
  payload["seeds"] = std::move(seeds);
  payload["pass_count"] = report.pass_count;
  payload["pass_rate"] = report.pass_rate;
  payload["quota"] = report.quota;
  payload["aggregate_pass"] = report.aggregate_pass;
  return payload.dump();
}

void emit_path_csv(const std::filesystem::path& dir, std::size_t path_index,
                   const Path& path, std::int64_t stride) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path file =
      dir / ("path_" + std::to_string(path_index) + ".csv");

  const std::vector<double> residuals = martingale_residuals(path);
  std::string body = "n,x,target,running_mean,residual\n";
  char line[192];
  auto emit_row = [&](std::int64_t i) {  // 1-based step
    std::snprintf(line, sizeof(line), "%lld,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(i), path.xs[i - 1],
                  path.targets[i - 1], path.running_mean[i - 1],
                  residuals[i - 1]);
    body += line;
  };
  for (std::int64_t i = stride; i <= path.n(); i += stride) emit_row(i);
  if (path.n() % stride != 0) emit_row(path.n());

  write_text_atomic(file, body);
}

}  // namespace sublex
