#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drivenloc/io.hpp"

namespace drivenloc {

constexpr int kSchemaVersion = 1;
constexpr const char* kCodeVersion = "drivenloc 1.0.0";

const std::vector<std::string>& scenario_names();

struct RunOptions {
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
};

/// Files produced by a scenario, keyed by relative name.
struct ScenarioOutput {
  std::map<std::string, std::string> files;
  std::vector<std::string> warnings;
  /// Hard assertions that failed; non-empty means exit status 1.
  std::vector<std::string> failures;
};

/// Validates `config` (unknown keys rejected, defaults filled in) and
/// returns the resolved configuration. Throws ConfigError with the field path.
Json resolve_config(const std::string& scenario, const Json& config, const RunOptions& options = {});

ScenarioOutput execute_scenario(const std::string& scenario, const Json& resolved, unsigned jobs);

struct RunManifest {
  Json json;
  bool failed = false;
  std::vector<std::string> failures;
};

/// Resolves, executes, writes outputs and manifest.json into `out_dir`.
RunManifest run_experiment(const std::string& scenario, const Json& config, const std::filesystem::path& out_dir,
                           const RunOptions& options);

struct ReplayReport {
  std::vector<std::string> identical;
  std::vector<std::string> differing;
  bool ok() const { return differing.empty(); }
};

/// Re-executes the resolved config stored in a manifest and compares output checksums.
ReplayReport replay_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
                             unsigned jobs);

}  // namespace drivenloc
