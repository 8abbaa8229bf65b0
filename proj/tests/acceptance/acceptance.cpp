// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fixture_data.hpp"
#include "lithocheck/report.hpp"
#include "lithocheck/task_pool.hpp"
#include "random_cases.hpp"

using namespace lithocheck;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void run_criterion(int id, const std::string& name, const std::function<Outcome()>& fn) {
  try {
    report(id, name, fn());
  } catch (const std::exception& e) {
    report(id, name, {false, std::string("exception: ") + e.what()});
  }
}

const std::vector<Orientation> kAll(std::begin(kAllOrientations), std::end(kAllOrientations));

// ---- shared runs ----

struct Runs {
  CellLibrary main_lib, fixed_lib, clean_lib;
  PatternDeck deck;
  RunResults main, fixed, clean;
  double main_seconds = 0;
};

RunConfig base_config(const std::string& lib, std::set<ScenarioKind> scenarios) {
  auto cfg = fixtures::run_config(lib, std::move(scenarios));
  cfg.n = 100;
  cfg.utilization = 0.7;
  cfg.seed = 1;
  cfg.jobs = 4;
  return cfg;
}

Runs& runs() {
  static Runs r = [] {
    Runs out;
    out.deck = fixtures::deck();
    out.main_lib = fixtures::library("main");
    out.fixed_lib = fixtures::library("fixed");
    out.clean_lib = fixtures::library("clean");
    auto t0 = Clock::now();
    out.main = run_flow(base_config("main", {ScenarioKind::Autoplace}));
    out.main_seconds = seconds_since(t0);
    out.fixed = run_flow(base_config("fixed", {ScenarioKind::Autoplace}));
    out.clean = run_flow(base_config("clean", {ScenarioKind::Autoplace}));
    return out;
  }();
  return r;
}

// ---- marker keys ----

using MarkerKey = std::tuple<std::string, Coord, Coord, Coord, Coord, Orientation>;

MarkerKey key_of(const std::string& pattern, const Marker& m) {
  return {pattern, m.rect.x_lo, m.rect.y_lo, m.rect.x_hi, m.rect.y_hi, m.orient};
}

std::string parent_of(const std::string& partial_id) { return partial_id.substr(0, partial_id.rfind(".p")); }

// Every full marker must be reproduced by each partial of its pattern.
// Returns the number of violations; `checked` counts full markers.
std::size_t monotonicity_violations(const std::vector<Marker>& full, const std::vector<Marker>& partial,
                                    const std::map<std::string, std::vector<std::string>>& partials_of,
                                    std::size_t& checked) {
  std::set<MarkerKey> have;
  for (const auto& m : partial) have.insert(key_of(m.pattern_id, m));
  std::size_t bad = 0;
  for (const auto& m : full) {
    ++checked;
    auto it = partials_of.find(m.pattern_id);
    if (it == partials_of.end()) continue;
    for (const auto& pid : it->second)
      if (!have.contains(key_of(pid, m))) ++bad;
  }
  return bad;
}

// ---- independent router checks ----

struct Tagged {
  Rect r;
  std::string tag;
  bool routed = false;
  std::string owner;  // instance for cell geometry
};

bool area_overlap(const Rect& a, const Rect& b) {
  return std::max(a.x_lo, b.x_lo) < std::min(a.x_hi, b.x_hi) && std::max(a.y_lo, b.y_lo) < std::min(a.y_hi, b.y_hi);
}

// Overlap or a shared edge of positive length.
bool conducts(const Rect& a, const Rect& b) {
  Coord ix = std::min(a.x_hi, b.x_hi) - std::max(a.x_lo, b.x_lo);
  Coord iy = std::min(a.y_hi, b.y_hi) - std::max(a.y_lo, b.y_lo);
  return ix >= 0 && iy >= 0 && (ix > 0 || iy > 0);
}

struct UnionFind {
  std::vector<std::size_t> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  std::size_t find(std::size_t x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

// Nets whose terminals are not all joined by their own geometry.
std::vector<std::string> disconnected_nets(const RoutedDesign& d, const CellLibrary& lib) {
  std::vector<std::string> bad;
  for (const auto& net : d.nets) {
    auto rit = d.routing.find(net.name);
    if (rit == d.routing.end()) continue;
    std::vector<std::pair<std::string, Rect>> shapes;
    UnionFind uf(0);
    std::vector<std::pair<std::size_t, std::size_t>> links;
    std::vector<std::size_t> terminal_first;
    for (const auto& t : net.terminals) {
      const Instance* inst = d.placement.find_instance(t.instance);
      Transform tr = instance_transform(*inst, lib);
      std::size_t first = shapes.size();
      terminal_first.push_back(first);
      for (const auto& [layer, s] : lib.cell(inst->cell).find_pin(t.pin)->shapes)
        for (const auto& r : s.rects()) shapes.push_back({layer, tr.apply(r)});
      for (std::size_t i = first + 1; i < shapes.size(); ++i) links.push_back({first, i});
    }
    for (const auto& [layer, s] : rit->second.wires)
      for (const auto& r : s.rects()) shapes.push_back({layer, r});
    for (const auto& v : rit->second.vias) {
      std::size_t a = shapes.size();
      shapes.push_back({v.lower, v.lower_enclosure});
      shapes.push_back({v.cut_layer, v.cut});
      shapes.push_back({v.upper, v.upper_enclosure});
      if (!v.lower_enclosure.contains(v.cut) || !v.upper_enclosure.contains(v.cut)) {
        bad.push_back(net.name + " (via cut outside enclosure)");
        continue;
      }
      links.push_back({a, a + 1});
      links.push_back({a + 1, a + 2});
    }
    uf = UnionFind(shapes.size());
    for (auto [a, b] : links) uf.unite(a, b);
    for (std::size_t i = 0; i < shapes.size(); ++i)
      for (std::size_t j = i + 1; j < shapes.size(); ++j)
        if (shapes[i].first == shapes[j].first && conducts(shapes[i].second, shapes[j].second)) uf.unite(i, j);
    for (auto f : terminal_first)
      if (uf.find(f) != uf.find(terminal_first.front())) {
        bad.push_back(net.name);
        break;
      }
  }
  return bad;
}

// Same-layer positive-area overlaps between different nets, counting routed
// geometry against pins, cell shapes and other routes.
std::size_t inter_net_overlaps(const RoutedDesign& d, const CellLibrary& lib) {
  std::map<std::pair<std::string, std::string>, std::string> net_of;
  for (const auto& net : d.nets)
    for (const auto& t : net.terminals) net_of[{t.instance, t.pin}] = net.name;
  std::map<std::string, std::vector<Tagged>> layers;
  for (const auto& inst : d.placement.instances) {
    Transform tr = instance_transform(inst, lib);
    const Cell& c = lib.cell(inst.cell);
    for (const auto& [layer, s] : c.shapes)
      for (const auto& r : s.rects()) layers[layer].push_back({tr.apply(r), inst.id + "#cell", false, inst.id});
    for (const auto& pin : c.pins) {
      auto it = net_of.find({inst.id, pin.name});
      std::string tag = it == net_of.end() ? inst.id + "/" + pin.name : it->second;
      for (const auto& [layer, s] : pin.shapes)
        for (const auto& r : s.rects()) layers[layer].push_back({tr.apply(r), tag, false, inst.id});
    }
  }
  for (const auto& [net, nr] : d.routing) {
    for (const auto& [layer, s] : nr.wires)
      for (const auto& r : s.rects()) layers[layer].push_back({r, net, true, ""});
    for (const auto& v : nr.vias) {
      layers[v.lower].push_back({v.lower_enclosure, net, true, ""});
      layers[v.cut_layer].push_back({v.cut, net, true, ""});
      layers[v.upper].push_back({v.upper_enclosure, net, true, ""});
    }
  }
  std::size_t count = 0;
  for (auto& [_, v] : layers) {
    std::sort(v.begin(), v.end(), [](const Tagged& a, const Tagged& b) { return a.r.x_lo < b.r.x_lo; });
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size() && v[j].r.x_lo < v[i].r.x_hi; ++j) {
        const auto &a = v[i], &b = v[j];
        if (a.tag == b.tag || !area_overlap(a.r, b.r)) continue;
        if (!a.routed && !b.routed && a.owner == b.owner) continue;  // inside one cell
        ++count;
      }
  }
  return count;
}

// ---- brute-force LFR ----

std::map<std::string, Percent> brute_min_lfr(const Placement& p, const std::vector<Marker>& markers,
                                              const CellLibrary& lib, const std::vector<int>& types) {
  std::map<std::string, std::map<int, std::pair<std::int64_t, std::int64_t>>> counts;  // cell -> type -> hit,total
  for (const auto& inst : p.instances) {
    Rect fp = instance_footprint(inst, lib);
    for (int t : types) {
      auto& c = counts[inst.cell][t];
      ++c.second;
      for (const auto& m : markers)
        if (m.type_id == t && area_overlap(fp, m.rect)) {
          ++c.first;
          break;
        }
    }
  }
  std::map<std::string, Percent> out;
  for (const auto& [cell, by_type] : counts) {
    Percent best(100, 1);
    for (const auto& [_, c] : by_type) best = std::min(best, Percent(100 * (c.second - c.first), c.second));
    out[cell] = best;
  }
  return out;
}

// ---- CLI helpers ----

int run_tool(const std::string& args) {
  std::string cmd = std::string("\"") + LITHOCHECK_TOOL + "\" " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::map<std::string, std::string> tree_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  return out;
}

}  // namespace

int main() {
  const int kSeeds = 300;

  run_criterion(1, "matcher equals sweep oracle", [&] {
    auto t0 = Clock::now();
    std::size_t compared = 0, mismatched = 0, markers = 0;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      auto c = cases::random_case(seed);
      LayoutIndex idx(c.layout);
      auto ol = cases::to_oracle(c.layout);
      std::vector<MatchPattern> pats{to_match_pattern(c.pattern)};
      for (auto mode : {PartialMode::DontCare, PartialMode::DeletionOnly})
        for (const auto& part : generate_partials(c.pattern, static_cast<Coord>(seed % 3), mode))
          pats.push_back(to_match_pattern(part));
      for (const auto& mp : pats) {
        auto got = match_pattern(idx, mp, kAll);
        ++compared;
        markers += got.size();
        if (got != oracle::sweep_match(ol, cases::to_oracle(mp), kAll)) ++mismatched;
      }
    }
    double secs = seconds_since(t0);
    std::ostringstream os;
    os << kSeeds << " layouts, " << compared << " patterns, " << markers << " markers, " << mismatched
       << " mismatches, " << secs << " s";
    return Outcome{mismatched == 0 && secs < 60.0, os.str()};
  });

  run_criterion(2, "partial pattern counts", [&] {
    auto deck = fixtures::deck();
    auto n1 = generate_partials(*deck.find("WP1")).size();
    auto n2 = generate_partials(*deck.find("WP2")).size();
    auto c1 = deck.find("WP1")->removable.size(), c2 = deck.find("WP2")->removable.size();
    std::ostringstream os;
    os << "WP1 " << c1 << " removable -> " << n1 << " partials, WP2 " << c2 << " removable -> " << n2 << " partials";
    return Outcome{c1 == 5 && n1 == 5 && c2 == 4 && n2 == 4, os.str()};
  });

  run_criterion(3, "full matches survive every partial", [&] {
    std::size_t checked = 0, bad = 0;
    // Random layouts from criterion 1.
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      auto c = cases::random_case(seed);
      LayoutIndex idx(c.layout);
      auto full = match_pattern(idx, to_match_pattern(c.pattern), kAll);
      std::map<std::string, std::vector<std::string>> partials_of;
      std::vector<Marker> partial;
      for (const auto& part : generate_partials(c.pattern, static_cast<Coord>(seed % 3))) {
        auto mp = to_match_pattern(part);
        partials_of[c.pattern.id].push_back(mp.id);
        auto m = match_pattern(idx, mp, kAll);
        partial.insert(partial.end(), m.begin(), m.end());
      }
      bad += monotonicity_violations(full, partial, partials_of, checked);
    }
    // Fixture deck on fixture layouts, plus each pattern stamped in every orientation.
    auto& r = runs();
    std::map<std::string, std::vector<std::string>> partials_of;
    for (const auto& mp : deck_match_patterns(r.deck, DeckMode::Partial, PartialMode::DontCare))
      partials_of[parent_of(mp.id)].push_back(mp.id);
    FlatLayout stamped{{0, 0, 4 * 400, 3 * 400}, {}};
    for (std::size_t pi = 0; pi < r.deck.patterns.size(); ++pi) {
      const auto& p = r.deck.patterns[pi];
      for (std::size_t oi = 0; oi < 4; ++oi) {
        Transform t = Transform::placing(kAllOrientations[oi], static_cast<Coord>(oi) * 400 + 80,
                                         static_cast<Coord>(pi) * 400 + 80, p.extent.width(), p.extent.height());
        for (const auto& [l, s] : p.solids) stamped.layers[l] = stamped.layers[l] | apply_transform(s, t);
      }
    }
    auto fig3 = fixtures::library("fig3");
    std::vector<FlatLayout> layouts = {stamped,
                                       flatten_all(gen_standalone(r.main_lib, scenario_config(base_config("main", {}), r.deck)), r.main_lib),
                                       flatten_all(gen_abutted(r.main_lib, scenario_config(base_config("main", {}), r.deck)).placement, r.main_lib),
                                       flatten_all(gen_standalone(fig3, scenario_config(base_config("fig3", {}), r.deck)), fig3),
                                       flatten_all(r.main.autoplace->routed.design, r.main_lib)};
    TaskPool pool(4);
    std::size_t fixture_full = 0;
    for (const auto& fl : layouts) {
      LayoutIndex idx(fl);
      DeckMatchOptions full_opt{DeckMode::Full, PartialMode::DontCare, kAll, &pool};
      DeckMatchOptions part_opt{DeckMode::Partial, PartialMode::DontCare, kAll, &pool};
      auto full = match_deck(idx, r.deck, full_opt);
      fixture_full += full.size();
      bad += monotonicity_violations(full, match_deck(idx, r.deck, part_opt), partials_of, checked);
    }
    std::ostringstream os;
    os << checked << " full matches checked (" << fixture_full << " on fixture layouts), " << bad
       << " missing partial matches";
    return Outcome{bad == 0 && fixture_full >= 12, os.str()};
  });

  run_criterion(4, "don't-care partials catch the fig3 cell, deletion does not", [&] {
    auto count = [](PartialMode mode) {
      auto cfg = base_config("fig3", {ScenarioKind::Standalone});
      cfg.partial_mode = mode;
      auto s = build_summary(run_flow(cfg));
      std::size_t n = 0;
      for (const auto& m : s["standalone"]["markers"])
        if (m["cell"] == "FIG3C") ++n;
      return n;
    };
    auto dc = count(PartialMode::DontCare), del = count(PartialMode::DeletionOnly);
    std::ostringstream os;
    os << "FIG3C markers: don't-care " << dc << ", deletion-only " << del;
    return Outcome{dc >= 1 && del == 0, os.str()};
  });

  run_criterion(5, "abutment-only weakpoint", [&] {
    auto cfg = base_config("main", {ScenarioKind::Standalone, ScenarioKind::Abutted});
    auto s = build_summary(run_flow(cfg));
    std::map<std::string, std::size_t> standalone{{"HASCL", 0}, {"HASCR", 0}};
    for (const auto& m : s["standalone"]["markers"]) {
      auto c = m["cell"].get<std::string>();
      if (standalone.contains(c)) ++standalone[c];
    }
    std::size_t abutted = 0;
    for (const auto& v : s["abutted"]["violations"]) {
      std::set<std::string> pair{v["left"].get<std::string>(), v["right"].get<std::string>()};
      if (pair == std::set<std::string>{"HASCL", "HASCR"}) ++abutted;
    }
    std::ostringstream os;
    os << "standalone HASCL " << standalone["HASCL"] << ", HASCR " << standalone["HASCR"]
       << "; abutted pair markers " << abutted;
    return Outcome{standalone["HASCL"] == 0 && standalone["HASCR"] == 0 && abutted >= 1, os.str()};
  });

  run_criterion(6, "LFR arithmetic", [&] {
    auto& r = runs();
    Placement p;
    p.name = "half";
    p.die = {0, 0, 200 * 800 + 40, 360};
    p.rows = {{0, Orientation::N}};
    std::vector<Marker> markers;
    for (int k = 0; k < 800; ++k) {
      char id[16];
      std::snprintf(id, sizeof id, "u%04d", k);
      p.instances.push_back({id, "INV", Orientation::N, 200 * k, 0});
      if (k % 2 == 0) markers.push_back({{200 * k + 60, 120, 200 * k + 100, 160}, "WP1", 1, Orientation::N, MatchKind::Full});
    }
    auto recs = compute_lfr(p, markers, r.clean_lib, r.deck, "half");
    bool half = false;
    for (const auto& rec : recs)
      if (rec.type_id == 1)
        half = rec.instance_total == 800 && rec.instance_hit == 400 && rec.pl_prime == Percent(50, 1) &&
               rec.lfr_prime == Percent(50, 1) && rec.pl_prime.milli() == 50000;
    std::size_t total = 0, bad = 0;
    std::vector<const std::vector<LfrRecord>*> all{&recs, &r.main.autoplace->records, &r.fixed.autoplace->records,
                                                   &r.clean.autoplace->records};
    for (const auto* rs : all)
      for (const auto& rec : *rs) {
        ++total;
        if (rec.pl_prime + rec.lfr_prime != Percent(100, 1)) ++bad;
        if (rec.pl_prime != Percent::of(rec.instance_hit, rec.instance_total)) ++bad;
      }
    std::ostringstream os;
    os << "400/800 gives 50%: " << (half ? "yes" : "no") << "; " << total << " records, " << bad
       << " break pl + lfr = 100";
    return Outcome{half && bad == 0, os.str()};
  });

  run_criterion(7, "seeded cell ranked worst", [&] {
    auto& r = runs();
    const auto& ap = *r.main.autoplace;
    auto ranks = ap.ranking;
    if (ranks.size() < 2) return Outcome{false, "fewer than two ranked cells"};
    auto brute = brute_min_lfr(ap.routed.design.placement, ap.markers, r.main_lib, r.deck.type_ids());
    bool agree = brute.size() == ranks.size();
    for (const auto& c : ranks) agree = agree && brute.contains(c.cell) && brute.at(c.cell) == c.min_lfr;
    bool strict = ranks[0].cell == "WEAKV" && ranks[0].min_lfr < ranks[1].min_lfr;
    std::ostringstream os;
    os << "first " << ranks[0].cell << " at " << ranks[0].min_lfr.display() << "%, next " << ranks[1].cell << " at "
       << ranks[1].min_lfr.display() << "%; brute force agrees: " << (agree ? "yes" : "no") << "; "
       << r.main_seconds << " s";
    return Outcome{strict && agree && r.main_seconds < 300.0, os.str()};
  });

  run_criterion(8, "obstruction over the weak region helps", [&] {
    auto& r = runs();
    const auto& a = *r.main.autoplace;
    const auto& b = *r.fixed.autoplace;
    bool same_netlist = serialize_netlist(a.netlist) == serialize_netlist(b.netlist) &&
                        a.routed.design.placement == b.routed.design.placement;
    auto min_of = [](const std::vector<CellRank>& ranks) {
      for (const auto& c : ranks)
        if (c.cell == "WEAKV") return c.min_lfr;
      throw std::runtime_error("WEAKV not ranked");
    };
    Percent before = min_of(a.ranking), after = min_of(b.ranking);
    std::ostringstream os;
    os << "markers " << a.markers.size() << " -> " << b.markers.size() << ", WEAKV min LFR' " << before.display()
       << "% -> " << after.display() << "%, same netlist and placement: " << (same_netlist ? "yes" : "no");
    return Outcome{same_netlist && b.markers.size() < a.markers.size() && before < after, os.str()};
  });

  run_criterion(9, "router soundness", [&] {
    auto& r = runs();
    std::ostringstream os;
    bool ok = true;
    std::vector<std::tuple<std::string, const AutoplaceResult*, const CellLibrary*>> designs{
        {"main", &*r.main.autoplace, &r.main_lib},
        {"fixed", &*r.fixed.autoplace, &r.fixed_lib},
        {"clean", &*r.clean.autoplace, &r.clean_lib}};
    for (const auto& [name, ap, lib] : designs) {
      const auto& d = ap->routed.design;
      auto open = disconnected_nets(d, *lib);
      auto overlaps = inter_net_overlaps(d, *lib);
      double skip = ap->routed.skip_fraction();
      bool good = open.empty() && overlaps == 0 && ap->connectivity_issues.empty() && ap->short_issues.empty() &&
                  skip <= 0.05;
      ok = ok && good;
      os << name << ": " << d.routing.size() << "/" << ap->routed.net_count << " routed, " << open.size()
         << " open, " << overlaps << " overlaps, skip " << skip * 100 << "%; ";
    }
    // The checks above must see a planted short and a planted open.
    auto d = r.main.autoplace->routed.design;
    auto first = d.routing.begin(), second = std::next(first);
    auto& wires = first->second.wires;
    const auto& layer = wires.begin()->first;
    second->second.wires[layer] = second->second.wires[layer] | RectSet{wires.begin()->second.rects().front()};
    wires.clear();
    bool caught = inter_net_overlaps(d, r.main_lib) > 0 && !disconnected_nets(d, r.main_lib).empty();
    os << "planted faults caught: " << (caught ? "yes" : "no");
    return Outcome{ok && caught, os.str()};
  });

  run_criterion(10, "jobs do not change the output", [&] {
    fs::path root = fs::temp_directory_path() / "lithocheck_acceptance";
    fs::remove_all(root);
    std::string common = "run --library \"" + fixtures::path("main.lib") + "\" --deck \"" + fixtures::path("deck.txt") +
                         "\" --tech \"" + fixtures::path("tech.txt") + "\" --n 100 --seed 1";
    std::vector<std::pair<std::string, int>> variants{{"j1", 1}, {"j16", 16}, {"j1b", 1}, {"j7", 7}};
    std::map<std::string, std::map<std::string, std::string>> trees;
    for (const auto& [dir, jobs] : variants) {
      int rc = run_tool(common + " --jobs " + std::to_string(jobs) + " --out \"" + (root / dir).string() + "\"");
      if (rc != 0 && rc != 1) return Outcome{false, "tool exited " + std::to_string(rc)};
      trees[dir] = tree_contents(root / dir);
    }
    const auto& ref = trees["j1"];
    bool has = ref.contains("summary.json") && ref.contains("index.html") && ref.contains("autoplace.html");
    bool same = std::all_of(trees.begin(), trees.end(), [&](const auto& kv) { return kv.second == ref; });
    std::ostringstream os;
    os << ref.size() << " files compared across jobs 1, 16, 1, 7: " << (same ? "identical" : "differ");
    return Outcome{has && same, os.str()};
  });

  std::printf("%s\n", failures == 0 ? "ALL PASS" : (std::to_string(failures) + " FAILED").c_str());
  return failures == 0 ? 0 : 1;
}
