#include "lithocheck/flow.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lithocheck/task_pool.hpp"

namespace lithocheck {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::Standalone: return "standalone";
    case ScenarioKind::Autoplace: return "autoplace";
    case ScenarioKind::Abutted: return "abutted";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario(std::string_view s) {
  for (auto k : {ScenarioKind::Standalone, ScenarioKind::Autoplace, ScenarioKind::Abutted})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::set<ScenarioKind> parse_scenario_list(std::string_view s) {
  std::set<ScenarioKind> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    auto name = s.substr(pos, comma - pos);
    if (name == "all") {
      out.insert({ScenarioKind::Standalone, ScenarioKind::Autoplace, ScenarioKind::Abutted});
    } else if (auto k = parse_scenario(name)) {
      out.insert(*k);
    } else {
      throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
    }
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("no scenario selected");
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (cfg.scenarios.empty()) throw std::invalid_argument("no scenario selected");
  if (cfg.n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(cfg.utilization > 0.0 && cfg.utilization < 1.0)) throw std::invalid_argument("utilization must lie in (0, 1)");
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 100.0)) throw std::invalid_argument("threshold must lie in [0, 100]");
  if (cfg.locality < 1) throw std::invalid_argument("locality must be at least 1");
  if (cfg.library.empty()) throw std::invalid_argument("no library given");
  if (cfg.deck.empty()) throw std::invalid_argument("no deck given");
  if (cfg.scenarios.contains(ScenarioKind::Autoplace) && cfg.tech.empty())
    throw std::invalid_argument("the autoplace scenario needs a tech file");
}

RunConfig load_config(const fs::path& file, RunConfig cfg) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(file.string() + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument(file.string() + ": settings must be a JSON object");
  fs::path base = file.parent_path();
  auto path_of = [&](const json& v) { return base / fs::path(v.get<std::string>()); };
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "library") cfg.library = path_of(v);
      else if (key == "deck") cfg.deck = path_of(v);
      else if (key == "tech") cfg.tech = path_of(v);
      else if (key == "out") cfg.out = path_of(v);
      else if (key == "jobs") cfg.jobs = v.get<int>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "n") cfg.n = v.get<int>();
      else if (key == "utilization") cfg.utilization = v.get<double>();
      else if (key == "threshold") cfg.threshold = v.get<double>();
      else if (key == "locality") cfg.locality = v.get<int>();
      else if (key == "all_orientation_pairs") cfg.all_orientation_pairs = v.get<bool>();
      else if (key == "partial_mode") {
        auto m = v.get<std::string>();
        if (m == "dontcare") cfg.partial_mode = PartialMode::DontCare;
        else if (m == "deletion") cfg.partial_mode = PartialMode::DeletionOnly;
        else throw std::invalid_argument("partial_mode must be dontcare or deletion");
      } else if (key == "scenarios") {
        std::string joined;
        for (const auto& s : v) joined += (joined.empty() ? "" : ",") + s.get<std::string>();
        cfg.scenarios = parse_scenario_list(joined);
      } else {
        throw std::invalid_argument("unknown setting");
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument(file.string() + ": setting '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(file.string() + ": setting '" + key + "': " + e.what());
    }
  }
  return cfg;
}

Percent threshold_percent(double threshold) {
  return Percent(static_cast<std::int64_t>(std::llround(threshold * 1000.0)), 1000);
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

ScenarioConfig scenario_config(const RunConfig& cfg, const PatternDeck& deck) {
  ScenarioConfig sc;
  sc.n = cfg.n;
  sc.utilization = cfg.utilization;
  sc.seed = cfg.seed;
  sc.locality = cfg.locality;
  sc.clearance = deck.max_extent_dimension();
  if (cfg.all_orientation_pairs) sc.abutment_orientations = all_abutment_orientations();
  return sc;
}

RunResults run_flow(const RunConfig& cfg) {
  validate(cfg);
  CellLibrary lib = parse_library(read_file(cfg.library), cfg.library.string());
  PatternDeck deck = parse_deck(read_file(cfg.deck), cfg.deck.string());
  std::optional<RouterTech> tech;
  if (cfg.scenarios.contains(ScenarioKind::Autoplace)) tech = parse_tech(read_file(cfg.tech), lib, cfg.tech.string());
  return run_flow(cfg, lib, deck, tech ? &*tech : nullptr);
}

RunResults run_flow(const RunConfig& cfg, const CellLibrary& lib, const PatternDeck& deck, const RouterTech* tech) {
  validate(cfg);
  RunResults res;
  res.config = cfg;
  res.library = lib;
  res.deck = deck;
  ScenarioConfig sc = scenario_config(cfg, deck);
  res.clearance = sc.clearance;
  TaskPool pool(static_cast<std::size_t>(cfg.jobs));

  auto options = [&](DeckMode mode) {
    DeckMatchOptions o;
    o.mode = mode;
    o.partial_mode = cfg.partial_mode;
    o.pool = &pool;
    return o;
  };

  std::vector<ScenarioKind> kinds(cfg.scenarios.begin(), cfg.scenarios.end());
  pool.parallel_for(kinds.size(), [&](std::size_t k) {
    switch (kinds[k]) {
      case ScenarioKind::Standalone: {
        StandaloneResult r;
        r.placement = gen_standalone(lib, sc);
        LayoutIndex index(flatten_all(r.placement, lib));
        r.markers = match_deck(index, deck, options(DeckMode::Both));
        res.standalone = std::move(r);
        break;
      }
      case ScenarioKind::Autoplace: {
        if (!tech) throw std::invalid_argument("the autoplace scenario needs a tech file");
        AutoplaceResult r;
        r.netlist = gen_netlist(lib, sc);
        Placement placed = gen_autoplace(lib, r.netlist, sc);
        placed.name = "autoplace";
        r.routed = route(lib, placed, r.netlist.nets, *tech, "autoplace");
        r.connectivity_issues = check_connectivity(r.routed.design, lib);
        r.short_issues = check_shorts(r.routed.design, lib);
        LayoutIndex index(flatten_all(r.routed.design, lib));
        r.markers = match_deck(index, deck, options(DeckMode::Full));
        r.records = compute_lfr(r.routed.design.placement, r.markers, lib, deck, "autoplace");
        r.ranking = rank_cells(r.records, threshold_percent(cfg.threshold));
        res.autoplace = std::move(r);
        break;
      }
      case ScenarioKind::Abutted: {
        AbuttedResult r;
        r.scenario = gen_abutted(lib, sc);
        LayoutIndex index(flatten_all(r.scenario.placement, lib));
        r.markers = match_deck(index, deck, options(DeckMode::Full));
        res.abutted = std::move(r);
        break;
      }
    }
  });
  return res;
}

}  // namespace lithocheck
