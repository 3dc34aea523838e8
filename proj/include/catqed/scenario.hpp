#pragma once

#include <string>
#include <vector>

#include "catqed/dynamics.hpp"
#include "catqed/hilbert.hpp"
#include "catqed/model.hpp"

namespace catqed {

// Integrator/run controls shared by all dynamical scenarios.  `step == 0`
// selects the automatic step rule of the chosen frame; `periods` measures the
// time horizon in units of the slow period 2*pi/|delta_a|.
struct IntegratorConfig {
  Method method = Method::rk4;
  Frame frame = Frame::rotating;
  double step = 0.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int samples_per_period = 2000;
  double periods = 1.0;
};

struct OutputOptions {
  std::string directory = ".";
  std::string format = "csv";  // "csv" or "json"
  int precision = 12;          // significant digits for table values
};

// One swept parameter: dotted path into the config (e.g. "model.kappa") plus
// the list of values.  Multiple sweeps combine as a cartesian product.
struct SweepSpec {
  std::string path;
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string scenario = "custom";
  ModelParams model;
  FockCutoffs cutoffs;
  IntegratorConfig integrator;
  std::vector<SweepSpec> sweeps;
  OutputOptions output;
  // Keys the user assigned explicitly (presets fill the rest).  Used to check
  // that "custom" configs spell out the full model.
  std::vector<std::string> explicit_keys;
};

struct ValidationIssue {
  bool is_error = false;
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const;  // true when no issue is an error (warnings allowed)
  int error_count() const;
  int warning_count() const;
  std::string to_string() const;
};

// A fully materialised result table: column names carry units in brackets
// (e.g. "t[1/lambda]"), rows are plain doubles, and `manifest` is a JSON
// document echoing the resolved configuration and derived parameters.
struct OutputTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string manifest;
  // True when an integration monitor flagged a threshold breach; the details
  // live in the manifest's "monitor" object.
  bool monitor_breach = false;
};

// Names of the built-in scenarios in presentation order.
std::vector<std::string> list_scenarios();

// One-line description of a built-in scenario; throws std::invalid_argument
// for unknown names.
std::string scenario_description(const std::string& name);

// Fully populated configuration for a built-in scenario.
ScenarioConfig preset(const std::string& name);

// Parses the flat "key = value" config dialect.  Lines starting with '#' (or
// trailing '#' comments) are ignored.  The file must name a scenario; all
// other keys override the preset.  Throws std::invalid_argument with a
// line-numbered message on malformed input.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

ValidationReport validate_config(const ScenarioConfig& config);

// Runs the scenario and returns its tables.  `threads` parallelises over
// sweep/grid entries; table order does not depend on thread count.  Throws
// std::invalid_argument for configs that fail validation; monitor breaches do
// not abort the run and are reported via OutputTable::monitor_breach.
std::vector<OutputTable> run_scenario(const ScenarioConfig& config,
                                      int threads = 1);

// Serialises `table` as RFC-4180-style CSV ('\n' line endings, quoting only
// when needed) with `precision` significant digits.
std::string table_to_csv(const OutputTable& table, int precision);

// Writes each table under options.directory as <name>.csv plus
// <name>.manifest.json ("csv") or a single <name>.json ("json").  Returns the
// list of files written.
std::vector<std::string> write_tables(const std::vector<OutputTable>& tables,
                                      const OutputOptions& options);

}  // namespace catqed
