#pragma once

#include "vvfrac/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vvfrac {

inline constexpr const char* kToolVersion = "0.1.0";

struct StageRecord {
  std::string name;
  std::string status;  // ok, failed, skipped
  double seconds = 0.0;
  std::string message;
};

// Gating checks decide the exit status; the others are diagnostics.
struct CheckRecord {
  std::string name;
  bool pass = true;
  bool gating = true;
  std::string detail;
};

struct RunManifest {
  std::string config_hash;  // SHA-256 of the config bytes
  std::string tool_version = kToolVersion;
  std::string mode;
  std::string units;
  std::string output_dir;
  double seconds = 0.0;
  std::vector<StageRecord> stages;
  std::vector<CheckRecord> checks;
  std::vector<std::string> files;  // relative to output_dir, sorted
  int exit_code = 0;               // 0 ok, 3 stage failure, 4 failed check
};

struct RunOptions {
  std::optional<RunMode> mode;
  std::optional<int> workers;
  std::optional<std::string> output_dir;
  bool with_oracle = false;
};

std::string sha256_hex(const std::string& bytes);

// Executes the mode end to end, writes every artifact and manifest.json into
// the output directory. Stage errors are caught and recorded; the manifest is
// always written.
RunManifest run(const ScenarioConfig& config, const RunOptions& options = {});

// Manifest as JSON text; `with_timing` false drops all timing fields.
std::string manifest_json(const RunManifest& m, bool with_timing = true);

}  // namespace vvfrac
