#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lithocheck/layout.hpp"
#include "lithocheck/matcher.hpp"
#include "lithocheck/metrics.hpp"
#include "lithocheck/pattern.hpp"
#include "lithocheck/router.hpp"
#include "lithocheck/scenarios.hpp"

namespace lithocheck {

enum class ScenarioKind : std::uint8_t { Standalone, Autoplace, Abutted };

std::string_view to_string(ScenarioKind s);
std::optional<ScenarioKind> parse_scenario(std::string_view s);
// Comma-separated names; throws std::invalid_argument on unknown or empty.
std::set<ScenarioKind> parse_scenario_list(std::string_view s);

struct RunConfig {
  std::filesystem::path library;
  std::filesystem::path deck;
  std::filesystem::path tech;
  std::set<ScenarioKind> scenarios{ScenarioKind::Standalone, ScenarioKind::Autoplace, ScenarioKind::Abutted};
  int jobs = 1;
  std::uint64_t seed = 1;
  int n = 800;
  double utilization = 0.7;
  double threshold = 85.0;
  std::filesystem::path out = "report";
  int locality = 3;
  PartialMode partial_mode = PartialMode::DontCare;
  bool all_orientation_pairs = false;
};

// Throws std::invalid_argument naming the offending field.
void validate(const RunConfig& cfg);

// Settings file: a JSON object whose keys mirror RunConfig. Relative paths
// resolve against the file's directory. Unknown keys are errors.
RunConfig load_config(const std::filesystem::path& file, RunConfig base = {});

Percent threshold_percent(double threshold);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

struct StandaloneResult {
  Placement placement;
  std::vector<Marker> markers;
};

struct AutoplaceResult {
  GeneratedNetlist netlist;
  RouteResult routed;
  std::vector<std::string> connectivity_issues;
  std::vector<std::string> short_issues;
  std::vector<Marker> markers;
  std::vector<LfrRecord> records;
  std::vector<CellRank> ranking;
};

struct AbuttedResult {
  AbuttedScenario scenario;
  std::vector<Marker> markers;
};

struct RunResults {
  RunConfig config;
  CellLibrary library;
  PatternDeck deck;
  Coord clearance = 0;
  std::optional<StandaloneResult> standalone;
  std::optional<AutoplaceResult> autoplace;
  std::optional<AbuttedResult> abutted;
};

// Parses the inputs and runs the selected scenarios on a pool of cfg.jobs
// workers. Parse problems surface as ParseError/ValidationError, routing
// over the skip limit as RoutingError.
RunResults run_flow(const RunConfig& cfg);

// Same with already-parsed inputs (tech may be null when autoplace is off).
RunResults run_flow(const RunConfig& cfg, const CellLibrary& lib, const PatternDeck& deck, const RouterTech* tech);

ScenarioConfig scenario_config(const RunConfig& cfg, const PatternDeck& deck);

}  // namespace lithocheck
