#pragma once

#include <optional>
#include <string>

#include "weaklab/json_io.hpp"

namespace weaklab {

struct ScenarioConfig {
  std::string scenario;
  Json params = Json::object();
  std::optional<std::uint64_t> seed;
  std::string format = "json";  // json | csv
  std::optional<std::string> out_path;
};

/// Names of the available scenarios, in CLI order.
const std::vector<std::string>& scenario_names();

/// Parses and validates a config document, collecting every problem.
/// `forced_scenario` (from the CLI subcommand) must agree with the config
/// when both are present; `seed_override` is the --seed flag, which wins
/// over the config field. Throws ConfigInvalid.
ScenarioConfig parse_config(
    const std::string& text, const std::string& forced_scenario = "",
    std::optional<std::uint64_t> seed_override = std::nullopt);

struct Report {
  Json body;
  std::optional<CsvTable> table;
};

/// Deterministic given (config, seed). Throws ConfigInvalid for parameter
/// problems and module errors for numerical ones.
Report run_scenario(const ScenarioConfig& cfg);

/// Rendered bytes for the requested format (csv requires a table).
std::string render_report(const Report& report, const std::string& format);

/// Parameter schema for `--describe`.
Json describe_scenario(const std::string& scenario);

}  // namespace weaklab
