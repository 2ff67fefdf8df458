// Experiment runner: one subcommand per scenario plus `replay`.
//
// Exit status: 0 success, 1 failed assertion or numerical failure,
// 2 invalid configuration or usage, 3 resource exhaustion.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "drivenloc/errors.hpp"
#include "drivenloc/experiment.hpp"

namespace fs = std::filesystem;
using namespace drivenloc;

namespace {

fs::path default_out(const std::string& scenario) {
  const char* root = std::getenv("DRIVENLOC_OUT");
  return fs::path(root && *root ? root : "out") / scenario;
}

int run_scenario(const std::string& scenario, const std::string& config_path, const std::string& out,
                 std::optional<std::uint64_t> seed, unsigned jobs) {
  Json config;
  try {
    config = Json::parse(read_file(config_path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(config_path + ": " + e.what());
  }
  const fs::path dir = out.empty() ? default_out(scenario) : fs::path(out);
  const RunManifest man = run_experiment(scenario, config, dir, {seed, jobs});
  std::cout << scenario << ": wrote " << (dir / "manifest.json").string() << "\n";
  for (const auto& w : man.json["warnings"]) std::cout << "warning: " << w.get<std::string>() << "\n";
  for (const auto& f : man.failures) std::cerr << "assertion failed: " << f << "\n";
  return man.failed ? 1 : 0;
}

int run_replay(const std::string& manifest, const std::string& out, unsigned jobs) {
  const fs::path dir = out.empty() ? fs::path(manifest).parent_path() / "replay" : fs::path(out);
  const ReplayReport rep = replay_manifest(manifest, dir, jobs);
  for (const auto& f : rep.identical) std::cout << "identical " << f << "\n";
  for (const auto& f : rep.differing) std::cout << "DIFFERENT " << f << "\n";
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven Anderson localization laboratory"};
  app.require_subcommand(1);

  std::string config, out, manifest;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  for (const auto& name : scenario_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--seed", seed, "override the base seed");
    sub->add_option("--out", out, "output directory (default $DRIVENLOC_OUT/<scenario>)");
    sub->add_option("--jobs", jobs, "worker threads, 0 for all cores");
  }
  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare checksums");
  replay->add_option("--manifest", manifest, "manifest.json of a previous run")->required();
  replay->add_option("--out", out, "directory for the regenerated outputs");
  replay->add_option("--jobs", jobs, "worker threads, 0 for all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay->parsed()) return run_replay(manifest, out, jobs);
    for (auto* sub : app.get_subcommands()) return run_scenario(sub->get_name(), config, out, seed, jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
