#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "catqed/scenario.hpp"
#include "catqed/version.hpp"

namespace {

// Exit codes: 0 success, 1 configuration/validation problem, 2 runtime or
// monitor failure during integration/output.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int resolve_config(const std::string& config_path,
                   const std::string& scenario_name,
                   catqed::ScenarioConfig& cfg) {
  if (config_path.empty() == scenario_name.empty()) {
    std::fprintf(stderr,
                 "error: pass exactly one of a config file or --scenario\n");
    return kExitConfig;
  }
  try {
    cfg = config_path.empty() ? catqed::preset(scenario_name)
                              : catqed::load_config_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catsim: entangled cat states in a frequency-modulated "
               "molecular cavity"};
  app.set_version_flag("--version", catqed::kVersion);
  app.require_subcommand(1);

  std::string config_path, scenario_name, out_dir, format;
  int threads = 1;
  bool seedless = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario and write tables");
  run->add_option("config", config_path, "config file ('key = value' lines)");
  run->add_option("--scenario", scenario_name,
                  "built-in scenario preset (alternative to a config file)");
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--format", format, "table format override")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "worker threads for parameter grids")
      ->check(CLI::PositiveNumber);
  run->add_flag("--seedless", seedless,
                "reserved for a future stochastic-unravelling mode");

  CLI::App* validate =
      app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config_path,
                       "config file ('key = value' lines)");
  validate->add_option("--scenario", scenario_name,
                       "built-in scenario preset to check");

  CLI::App* list =
      app.add_subcommand("list-scenarios", "list the built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }

  if (list->parsed()) {
    for (const auto& name : catqed::list_scenarios()) {
      std::printf("%-10s %s\n", name.c_str(),
                  catqed::scenario_description(name).c_str());
    }
    return kExitOk;
  }

  if (seedless) {
    std::fprintf(stderr,
                 "error: --seedless is reserved for a future "
                 "stochastic-unravelling mode and is not accepted yet\n");
    return kExitConfig;
  }

  catqed::ScenarioConfig cfg;
  if (int rc = resolve_config(config_path, scenario_name, cfg); rc != kExitOk) {
    return rc;
  }

  if (validate->parsed()) {
    const catqed::ValidationReport report = catqed::validate_config(cfg);
    std::fputs(report.to_string().c_str(), stdout);
    if (!report.ok()) {
      std::printf("invalid: %d error(s), %d warning(s)\n", report.error_count(),
                  report.warning_count());
      return kExitConfig;
    }
    std::printf("ok: scenario '%s' (%d warning(s))\n", cfg.scenario.c_str(),
                report.warning_count());
    return kExitOk;
  }

  // run
  if (!out_dir.empty()) cfg.output.directory = out_dir;
  if (!format.empty()) cfg.output.format = format;

  const catqed::ValidationReport report = catqed::validate_config(cfg);
  std::fputs(report.to_string().c_str(), stderr);
  if (!report.ok()) return kExitConfig;

  std::vector<catqed::OutputTable> tables;
  try {
    tables = catqed::run_scenario(cfg, threads);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kExitRuntime;
  }

  std::vector<std::string> written;
  try {
    written = catqed::write_tables(tables, cfg.output);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kExitRuntime;
  }
  for (const auto& path : written) std::printf("wrote %s\n", path.c_str());

  bool breach = false;
  for (const auto& table : tables) breach = breach || table.monitor_breach;
  if (breach) {
    std::fprintf(stderr,
                 "monitor: at least one run breached a conservation or "
                 "truncation threshold; see the 'monitor' object in the "
                 "manifests\n");
    return kExitRuntime;
  }
  return kExitOk;
}
