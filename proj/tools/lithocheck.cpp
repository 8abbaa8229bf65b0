// lithocheck: batch standard-cell lithography weakpoint checks.
//
// Exit status: 0 clean, 1 findings, 2 error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lithocheck/flow.hpp"
#include "lithocheck/report.hpp"
#include "lithocheck/task_pool.hpp"

namespace fs = std::filesystem;
using namespace lithocheck;

namespace {

constexpr int kError = 2;

struct RunFlags {
  std::string config, library, deck, tech, scenarios, out, partial_mode;
  int jobs = 1, n = 800, locality = 3;
  std::uint64_t seed = 1;
  double threshold = 85.0, utilization = 0.7;
  bool all_pairs = false;
};

void add_common(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--library", f.library, "cell library file");
  cmd->add_option("--deck", f.deck, "weakpoint pattern deck");
  cmd->add_option("--tech", f.tech, "router technology file");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--n", f.n, "instances per cell in the auto-placed design")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output path");
}

RunConfig make_config(CLI::App* cmd, const RunFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--library")) cfg.library = f.library;
  if (given("--deck")) cfg.deck = f.deck;
  if (given("--tech")) cfg.tech = f.tech;
  if (given("--scenarios")) cfg.scenarios = parse_scenario_list(f.scenarios);
  if (given("--jobs")) cfg.jobs = f.jobs;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--n")) cfg.n = f.n;
  if (given("--out")) cfg.out = f.out;
  if (given("--threshold")) cfg.threshold = f.threshold;
  if (given("--utilization")) cfg.utilization = f.utilization;
  if (given("--locality")) cfg.locality = f.locality;
  if (given("--all-orientation-pairs")) cfg.all_orientation_pairs = f.all_pairs;
  if (given("--partial-mode")) {
    if (f.partial_mode == "dontcare") cfg.partial_mode = PartialMode::DontCare;
    else if (f.partial_mode == "deletion") cfg.partial_mode = PartialMode::DeletionOnly;
    else throw std::invalid_argument("--partial-mode must be dontcare or deletion");
  }
  validate(cfg);
  return cfg;
}

PartialMode partial_mode_of(const std::string& s) {
  if (s.empty() || s == "dontcare") return PartialMode::DontCare;
  if (s == "deletion") return PartialMode::DeletionOnly;
  throw std::invalid_argument("--partial-mode must be dontcare or deletion");
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
}

int cmd_run(CLI::App* cmd, const RunFlags& f) {
  RunConfig cfg = make_config(cmd, f);
  RunResults res = run_flow(cfg);
  auto summary = build_summary(res);
  write_report(render_report(summary), cfg.out);
  if (res.autoplace) write_file(cfg.out / "lfr.txt", serialize_lfr(res.autoplace->records));
  const auto& fd = summary["findings"];
  std::cerr << "standalone markers: " << fd["standalone_markers"] << ", problematic cells: " << fd["problematic_cells"]
            << ", abutment violations: " << fd["abutment_violations"] << '\n';
  return findings_status(summary);
}

int cmd_match(const RunFlags& f, const std::string& layout, const std::string& mode) {
  if (f.library.empty() || f.deck.empty() || layout.empty()) throw std::invalid_argument("match needs --library, --deck and --layout");
  CellLibrary lib = parse_library(read_file(f.library), f.library);
  PatternDeck deck = parse_deck(read_file(f.deck), f.deck);
  std::string text = read_file(layout);
  FlatLayout flat;
  if (text.find("DESIGN") < text.find("PLACEMENT")) flat = flatten_all(parse_routed_design(text, lib, layout), lib);
  else flat = flatten_all(parse_placement(text, lib, layout), lib);
  DeckMatchOptions o;
  if (mode == "full") o.mode = DeckMode::Full;
  else if (mode == "partial") o.mode = DeckMode::Partial;
  else if (mode == "both") o.mode = DeckMode::Both;
  else throw std::invalid_argument("--mode must be full, partial or both");
  o.partial_mode = partial_mode_of(f.partial_mode);
  TaskPool pool(static_cast<std::size_t>(f.jobs));
  o.pool = &pool;
  auto markers = match_deck(LayoutIndex(std::move(flat)), deck, o);
  emit(f.out, serialize_markers(markers));
  return markers.empty() ? 0 : 1;
}

int cmd_partials(const RunFlags& f) {
  if (f.deck.empty()) throw std::invalid_argument("partials needs --deck");
  PatternDeck deck = parse_deck(read_file(f.deck), f.deck);
  PartialMode mode = partial_mode_of(f.partial_mode);
  std::string text;
  for (const auto& p : deck.patterns) text += serialize_partials(generate_partials(p, deck.margin, mode));
  emit(f.out, text);
  return 0;
}

int cmd_route(const RunFlags& f, const std::string& placement_file, const std::string& netlist_file) {
  if (f.library.empty() || f.tech.empty()) throw std::invalid_argument("route needs --library and --tech");
  CellLibrary lib = parse_library(read_file(f.library), f.library);
  RouterTech tech = parse_tech(read_file(f.tech), lib, f.tech);
  ScenarioConfig sc;
  sc.n = f.n;
  sc.seed = f.seed;
  sc.utilization = f.utilization;
  sc.locality = f.locality;
  GeneratedNetlist nl = netlist_file.empty() ? gen_netlist(lib, sc) : parse_netlist(read_file(netlist_file), lib, netlist_file);
  Placement pl = placement_file.empty() ? gen_autoplace(lib, nl, sc) : parse_placement(read_file(placement_file), lib, placement_file);
  RouteResult r = route(lib, pl, nl.nets, tech, pl.name.empty() ? "design" : pl.name);
  for (const auto& s : r.skipped) std::cerr << "skipped " << s.net << ": " << s.reason << '\n';
  auto issues = check_connectivity(r.design, lib);
  auto shorts = check_shorts(r.design, lib);
  for (const auto& i : issues) std::cerr << "open: " << i << '\n';
  for (const auto& i : shorts) std::cerr << "short: " << i << '\n';
  emit(f.out, serialize_routed_design(r.design));
  return issues.empty() && shorts.empty() ? 0 : 1;
}

int cmd_report(const std::string& summary_file, const std::string& out) {
  fs::path dir = out.empty() ? fs::path("report") : fs::path(out);
  fs::path src = summary_file.empty() ? dir / "summary.json" : fs::path(summary_file);
  nlohmann::json summary;
  try {
    summary = nlohmann::json::parse(read_file(src));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(src.string() + ": " + e.what());
  }
  write_report(render_report(summary), dir);
  return findings_status(summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Standard-cell lithography weakpoint checks"};
  app.require_subcommand(1);
  RunFlags f;

  auto* run = app.add_subcommand("run", "run the selected scenarios and write the report");
  add_common(run, f);
  run->add_option("--config", f.config, "JSON settings file; command-line flags win");
  run->add_option("--scenarios", f.scenarios, "comma-separated: standalone,autoplace,abutted or all");
  run->add_option("--threshold", f.threshold, "LFR' percentage at or below which a cell is problematic");
  run->add_option("--utilization", f.utilization, "auto-placed row utilization");
  run->add_option("--locality", f.locality, "net partners come from this many following instances");
  run->add_option("--partial-mode", f.partial_mode, "dontcare or deletion");
  run->add_flag("--all-orientation-pairs", f.all_pairs, "abut every orientation pair, not only N/FN");

  std::string layout, mode = "both", placement_file, netlist_file, summary_file;
  auto* match = app.add_subcommand("match", "match a deck against a placement or routed design file");
  add_common(match, f);
  match->add_option("--layout", layout, "placement or routed design file")->required();
  match->add_option("--mode", mode, "full, partial or both");
  match->add_option("--partial-mode", f.partial_mode, "dontcare or deletion");

  auto* partials = app.add_subcommand("partials", "print the partial patterns generated from a deck");
  add_common(partials, f);
  partials->add_option("--partial-mode", f.partial_mode, "dontcare or deletion");

  auto* route_cmd = app.add_subcommand("route", "route one design and print it");
  add_common(route_cmd, f);
  route_cmd->add_option("--placement", placement_file, "placement file (default: generated)");
  route_cmd->add_option("--netlist", netlist_file, "netlist file (default: generated)");
  route_cmd->add_option("--utilization", f.utilization, "utilization for a generated placement");
  route_cmd->add_option("--locality", f.locality, "net locality for a generated netlist");

  auto* report = app.add_subcommand("report", "re-render a report from its summary.json");
  report->add_option("--summary", summary_file, "summary file (default: <out>/summary.json)");
  report->add_option("--out", f.out, "report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kError;
  }

  try {
    if (*run) return cmd_run(run, f);
    if (*match) return cmd_match(f, layout, mode);
    if (*partials) return cmd_partials(f);
    if (*route_cmd) return cmd_route(f, placement_file, netlist_file);
    if (*report) return cmd_report(summary_file, f.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
