#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "blq/bl_data.hpp"
#include "blq/report.hpp"

namespace blq {

// Command-line replacements for the scenario's own seed and tolerance.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

// Parses and validates a scenario document; throws SchemaError with the
// offending field named.
Json parse_scenario(const std::string& text);
Json load_scenario_file(const std::string& path);
void validate_scenario(const Json& s);

// Scenario by file path, or by name looked up as <dir>/<name>.json in the
// BLQ_SCENARIO_DIR directory (default: the shipped scenarios tree).
std::string resolve_scenario(const std::string& path_or_name);

// Runs the task. Engine errors are recorded in the report (with whatever
// results were produced before the failure) rather than thrown.
RunReport run_scenario(const Json& scenario, const RunOverrides& overrides = {});

// Writes <name>.json, <name>.csv and one CSV per table into dir.
void write_report(const RunReport& report, const std::string& dir);

// Datum from {"family": ...} or {"maps": [...], "c": [...]}.
BLDatum parse_datum(const Json& j);

}  // namespace blq
