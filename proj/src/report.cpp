#include "lithocheck/report.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lithocheck/spatial_index.hpp"

namespace lithocheck {

using nlohmann::json;

namespace {

json rect_json(const Rect& r) { return json::array({r.x_lo, r.y_lo, r.x_hi, r.y_hi}); }

Rect json_rect(const json& j) { return {j.at(0).get<Coord>(), j.at(1).get<Coord>(), j.at(2).get<Coord>(), j.at(3).get<Coord>()}; }

json percent_json(const Percent& p) {
  return {{"num", p.num()}, {"den", p.den()}, {"milli", p.milli()}, {"display", p.display()}};
}

json marker_json(const Marker& m) {
  return {{"pattern", m.pattern_id},
          {"type", m.type_id},
          {"kind", std::string(to_string(m.kind))},
          {"orient", std::string(to_string(m.orient))},
          {"rect", rect_json(m.rect)}};
}

json layer_shapes_json(const LayerShapes& shapes) {
  json out = json::object();
  for (const auto& [layer, s] : shapes) {
    json rects = json::array();
    for (const auto& r : s.rects()) rects.push_back(rect_json(r));
    out[layer] = rects;
  }
  return out;
}

// Geometry and cell-local markers of flagged cells, for the SVG figures.
class FlaggedCells {
 public:
  explicit FlaggedCells(const CellLibrary& lib) : lib_(lib) {}

  void add(const Instance& inst, const Marker& m, std::string_view scenario) {
    Transform back = instance_transform(inst, lib_).inverse();
    markers_[inst.cell].insert({std::string(scenario), m.pattern_id, m.type_id, back.apply(m.rect)});
  }

  json to_json() const {
    json out = json::object();
    for (const auto& [name, marks] : markers_) {
      const Cell& c = lib_.cell(name);
      // Pins are drawn with the other shapes of their layer.
      LayerShapes all = c.shapes;
      for (const auto& p : c.pins)
        for (const auto& [layer, s] : p.shapes) all[layer] = all[layer] | s;
      json mj = json::array();
      for (const auto& m : marks)
        mj.push_back({{"scenario", m.scenario}, {"pattern", m.pattern}, {"type", m.type}, {"rect", rect_json(m.rect)}});
      out[name] = {{"width", c.width()},
                   {"height", c.height()},
                   {"layers", layer_shapes_json(all)},
                   {"obstructions", layer_shapes_json(c.obstructions)},
                   {"markers", mj}};
    }
    return out;
  }

 private:
  struct LocalMarker {
    std::string scenario;
    std::string pattern;
    int type;
    Rect rect;
    auto operator<=>(const LocalMarker&) const = default;
  };
  const CellLibrary& lib_;
  std::map<std::string, std::set<LocalMarker>> markers_;
};

RectIndex footprint_index(const Placement& p, const CellLibrary& lib) {
  RectIndex idx(p.die.expanded(1), std::max<Coord>(64, std::max(p.die.width(), p.die.height()) / 256));
  for (std::size_t i = 0; i < p.instances.size(); ++i) idx.insert(instance_footprint(p.instances[i], lib), static_cast<std::int64_t>(i));
  return idx;
}

// Instances whose footprint overlaps `r` with positive area, in id order.
std::vector<std::size_t> hit_instances(const RectIndex& idx, const Rect& r) {
  std::vector<std::size_t> out;
  idx.visit(r, [&](std::size_t id, const Rect& fp) {
    if (fp.overlaps(r)) out.push_back(static_cast<std::size_t>(idx.tag(id)));
  });
  std::ranges::sort(out);
  return out;
}

}  // namespace

json build_summary(const RunResults& res) {
  const CellLibrary& lib = res.library;
  const RunConfig& cfg = res.config;
  FlaggedCells flagged(lib);
  json s = json::object();

  json scenarios = json::array();
  for (auto k : cfg.scenarios) scenarios.push_back(std::string(to_string(k)));
  ScenarioConfig sc = scenario_config(cfg, res.deck);
  json pairs = json::array();
  for (const auto& [a, b] : sc.abutment_orientations)
    pairs.push_back(json::array({std::string(to_string(a)), std::string(to_string(b))}));
  s["config"] = {{"library", lib.name},
                 {"deck", res.deck.name},
                 {"process", res.deck.process},
                 {"margin", res.deck.margin},
                 {"scenarios", scenarios},
                 {"seed", cfg.seed},
                 {"n", cfg.n},
                 {"utilization", cfg.utilization},
                 {"threshold", percent_json(threshold_percent(cfg.threshold))},
                 {"locality", cfg.locality},
                 {"partial_mode", cfg.partial_mode == PartialMode::DontCare ? "dontcare" : "deletion"},
                 {"clearance", res.clearance},
                 {"orientation_pairs", pairs},
                 {"types", res.deck.type_ids()}};

  std::int64_t standalone_markers = 0, problematic = 0, violations = 0;

  if (res.standalone) {
    const auto& st = *res.standalone;
    auto idx = footprint_index(st.placement, lib);
    json markers = json::array();
    for (const auto& m : st.markers) {
      json mj = marker_json(m);
      auto hits = hit_instances(idx, m.rect);
      if (hits.empty()) {
        mj["cell"] = "";
        mj["instance"] = "";
      } else {
        const Instance& inst = st.placement.instances[hits.front()];
        mj["cell"] = inst.cell;
        mj["instance"] = inst.id;
        flagged.add(inst, m, "standalone");
      }
      markers.push_back(mj);
    }
    standalone_markers = static_cast<std::int64_t>(st.markers.size());
    s["standalone"] = {{"instances", st.placement.instances.size()}, {"die", rect_json(st.placement.die)}, {"markers", markers}};
  }

  if (res.autoplace) {
    const auto& ap = *res.autoplace;
    const Placement& pl = ap.routed.design.placement;
    auto idx = footprint_index(pl, lib);
    json markers = json::array();
    std::vector<std::vector<std::size_t>> hits_of;
    std::map<int, std::int64_t> counts;
    for (int t : res.deck.type_ids()) counts[t] = 0;
    for (const auto& m : ap.markers) {
      json mj = marker_json(m);
      auto hits = hit_instances(idx, m.rect);
      json ids = json::array();
      for (auto h : hits) ids.push_back(pl.instances[h].id);
      mj["instances"] = ids;
      markers.push_back(mj);
      hits_of.push_back(std::move(hits));
      ++counts[m.type_id];
    }
    json count_json = json::object();
    for (const auto& [t, c] : counts) count_json[std::to_string(t)] = c;

    json records = json::array();
    for (const auto& r : ap.records)
      records.push_back({{"cell", r.cell},
                         {"type", r.type_id},
                         {"design", r.design},
                         {"hit", r.instance_hit},
                         {"total", r.instance_total},
                         {"pl", percent_json(r.pl_prime)},
                         {"lfr", percent_json(r.lfr_prime)}});

    std::map<std::string, std::int64_t> totals;
    for (const auto& r : ap.records) totals[r.cell] = r.instance_total;
    auto all = static_cast<std::int64_t>(pl.instances.size());
    json ranking = json::array();
    json problem_cells = json::array();
    std::set<std::string> problem_set;
    for (std::size_t i = 0; i < ap.ranking.size(); ++i) {
      const auto& c = ap.ranking[i];
      ranking.push_back({{"rank", i + 1},
                         {"cell", c.cell},
                         {"instances", totals[c.cell]},
                         {"share", percent_json(Percent::of(totals[c.cell], all))},
                         {"min_lfr", percent_json(c.min_lfr)},
                         {"worst_type", c.worst_type},
                         {"problematic", c.problematic}});
      if (c.problematic) {
        problem_cells.push_back(c.cell);
        problem_set.insert(c.cell);
      }
    }
    problematic = static_cast<std::int64_t>(problem_set.size());
    // Figure for each problematic cell: the first hit instance and its markers.
    for (const auto& cell : problem_set) {
      std::optional<std::size_t> rep;
      for (std::size_t k = 0; k < ap.markers.size(); ++k)
        for (auto h : hits_of[k])
          if (pl.instances[h].cell == cell && (!rep || h < *rep)) rep = h;
      if (!rep) continue;
      for (std::size_t k = 0; k < ap.markers.size(); ++k)
        if (std::ranges::find(hits_of[k], *rep) != hits_of[k].end()) flagged.add(pl.instances[*rep], ap.markers[k], "autoplace");
    }

    json skipped = json::array();
    for (const auto& sk : ap.routed.skipped) skipped.push_back({{"net", sk.net}, {"reason", sk.reason}});
    s["autoplace"] = {{"instances", pl.instances.size()},
                      {"die", rect_json(pl.die)},
                      {"nets", ap.routed.net_count},
                      {"routed_nets", ap.routed.design.routing.size()},
                      {"skipped", skipped},
                      {"skip_share", percent_json(Percent::of(static_cast<std::int64_t>(ap.routed.skipped.size()),
                                                              std::max<std::int64_t>(1, static_cast<std::int64_t>(ap.routed.net_count))))},
                      {"connectivity_issues", ap.connectivity_issues},
                      {"short_issues", ap.short_issues},
                      {"markers", markers},
                      {"marker_counts", count_json},
                      {"records", records},
                      {"ranking", ranking},
                      {"problematic", problem_cells}};
  }

  if (res.abutted) {
    const auto& ab = *res.abutted;
    const Placement& pl = ab.scenario.placement;
    json rows = json::array();
    for (const auto& m : ab.markers) {
      json mj = marker_json(m);
      const PairRecord* pair = nullptr;
      for (const auto& p : ab.scenario.pairs)
        if (p.region.overlaps(m.rect)) {
          pair = &p;
          break;
        }
      if (pair) {
        mj["slot"] = pair->slot;
        mj["left"] = pair->left_cell;
        mj["left_orient"] = std::string(to_string(pair->left_orient));
        mj["right"] = pair->right_cell;
        mj["right_orient"] = std::string(to_string(pair->right_orient));
        for (const auto* id : {&pair->left_instance, &pair->right_instance})
          if (const Instance* inst = pl.find_instance(*id); inst && instance_footprint(*inst, lib).overlaps(m.rect))
            flagged.add(*inst, m, "abutted");
      } else {
        mj["slot"] = -1;
        mj["left"] = mj["right"] = mj["left_orient"] = mj["right_orient"] = "";
      }
      rows.push_back(mj);
    }
    json omitted = json::array();
    for (const auto& o : ab.scenario.omitted)
      omitted.push_back({{"left", o.left_cell},
                         {"left_orient", std::string(to_string(o.left_orient))},
                         {"right", o.right_cell},
                         {"right_orient", std::string(to_string(o.right_orient))},
                         {"constraint", o.constraint}});
    violations = static_cast<std::int64_t>(ab.markers.size());
    s["abutted"] = {{"pairs", ab.scenario.pairs.size()},
                    {"instances", pl.instances.size()},
                    {"die", rect_json(pl.die)},
                    {"violations", rows},
                    {"omitted", omitted}};
  }

  s["cells"] = flagged.to_json();
  int status = (standalone_markers > 0 || problematic > 0 || violations > 0) ? 1 : 0;
  s["findings"] = {{"standalone_markers", standalone_markers},
                   {"problematic_cells", problematic},
                   {"abutment_violations", violations},
                   {"status", status}};
  s["format"] = "lithocheck-summary/1";
  return s;
}

std::string summary_text(const json& summary) { return summary.dump(2) + "\n"; }

int findings_status(const json& summary) { return summary.at("findings").at("status").get<int>(); }

namespace {

std::string esc(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string str(const json& j) {
  if (j.is_string()) return esc(j.get<std::string>());
  return esc(j.dump());
}

std::string rect_text(const json& r) {
  std::ostringstream os;
  os << '(' << r.at(0).get<Coord>() << ", " << r.at(1).get<Coord>() << ") - (" << r.at(2).get<Coord>() << ", "
     << r.at(3).get<Coord>() << ')';
  return os.str();
}

std::string pct(const json& p) { return esc(p.at("display").get<std::string>()) + "%"; }

const char* kStyle =
    "body{font-family:sans-serif;margin:2em;color:#222}"
    "table{border-collapse:collapse;margin:1em 0}"
    "th,td{border:1px solid #999;padding:3px 8px;text-align:right}"
    "th:first-child,td:first-child{text-align:left}"
    ".bad{background:#f6d0d0}"
    "nav a{margin-right:1em}"
    "figure{display:inline-block;margin:1em}";

std::string page(const std::string& title, const std::string& body) {
  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" << esc(title)
     << "</title>\n<style>" << kStyle << "</style>\n</head>\n<body>\n"
     << "<nav><a href=\"index.html\">Overview</a><a href=\"standalone.html\">Standalone</a>"
     << "<a href=\"autoplace.html\">Auto-placed</a><a href=\"abutted.html\">Abutted</a></nav>\n"
     << "<h1>" << esc(title) << "</h1>\n"
     << body << "</body>\n</html>\n";
  return os.str();
}

struct Table {
  std::ostringstream os;
  explicit Table(const std::vector<std::string>& head, const std::string& caption = "") {
    os << "<table>\n";
    if (!caption.empty()) os << "<caption>" << caption << "</caption>\n";
    os << "<tr>";
    for (const auto& h : head) os << "<th>" << h << "</th>";
    os << "</tr>\n";
  }
  void row(const std::vector<std::string>& cells, bool bad = false) {
    os << (bad ? "<tr class=\"bad\">" : "<tr>");
    for (const auto& c : cells) os << "<td>" << c << "</td>";
    os << "</tr>\n";
  }
  std::string done() {
    os << "</table>\n";
    return os.str();
  }
};

std::string figure_for(const json& summary, const std::string& cell) {
  if (!summary.at("cells").contains(cell)) return "";
  return "<figure><img src=\"cells/" + esc(cell) + ".svg\" alt=\"" + esc(cell) + "\"><figcaption>" + esc(cell) +
         "</figcaption></figure>\n";
}

std::string standalone_page(const json& s) {
  std::ostringstream b;
  if (!s.contains("standalone")) {
    b << "<p>Scenario not run.</p>\n";
    return page("Standalone cells", b.str());
  }
  const json& st = s["standalone"];
  b << "<p>" << st["instances"].get<std::size_t>()
    << " cells placed one per row with free space around each; full and partial patterns (" << str(s["config"]["partial_mode"])
    << " partials), no routing.</p>\n";
  std::map<std::string, std::vector<const json*>> by_cell;
  for (const auto& m : st["markers"]) by_cell[m["cell"].get<std::string>()].push_back(&m);
  if (by_cell.empty()) b << "<p>No findings.</p>\n";
  for (const auto& [cell, ms] : by_cell) {
    b << "<h2>" << (cell.empty() ? std::string("Outside any cell") : esc(cell)) << "</h2>\n";
    Table t({"Pattern", "Type", "Kind", "Orientation", "Instance", "Marker"});
    for (const json* m : ms)
      t.row({str((*m)["pattern"]), str((*m)["type"]), str((*m)["kind"]), str((*m)["orient"]), str((*m)["instance"]),
             rect_text((*m)["rect"])});
    b << t.done();
    if (!cell.empty()) b << figure_for(s, cell);
  }
  return page("Standalone cells", b.str());
}

std::string autoplace_page(const json& s) {
  std::ostringstream b;
  if (!s.contains("autoplace")) {
    b << "<p>Scenario not run.</p>\n";
    return page("Auto-placed design", b.str());
  }
  const json& ap = s["autoplace"];
  b << "<p>" << ap["instances"].get<std::size_t>() << " instances (n = " << s["config"]["n"].get<int>()
    << " per cell), " << ap["nets"].get<std::size_t>() << " nets, " << ap["skipped"].size() << " skipped ("
    << pct(ap["skip_share"]) << "). Full patterns only. Threshold " << pct(s["config"]["threshold"]) << ".</p>\n";
  b << "<p>Pin access lands vias on track intersections; a commercial router may pick other landing points.</p>\n";

  const json& ranking = ap["ranking"];
  std::vector<int> types;
  for (const auto& t : s["config"]["types"]) types.push_back(t.get<int>());
  std::map<std::pair<std::string, int>, const json*> rec;
  for (const auto& r : ap["records"]) rec[{r["cell"].get<std::string>(), r["type"].get<int>()}] = &r;

  b << "<h2>Cell ranking</h2>\n";
  std::vector<std::string> head{""};
  for (const auto& c : ranking) head.push_back(str(c["cell"]));
  Table t(head, "LFR&prime; per cell and weakpoint type, lowest minimum first");
  std::vector<std::string> row{"Instances"};
  for (const auto& c : ranking) row.push_back(str(c["instances"]));
  t.row(row);
  row = {"Share of all instances"};
  for (const auto& c : ranking) row.push_back(pct(c["share"]));
  t.row(row);
  for (int ty : types) {
    row = {"LFR&prime; type " + std::to_string(ty)};
    for (const auto& c : ranking) {
      auto it = rec.find({c["cell"].get<std::string>(), ty});
      row.push_back(it == rec.end() ? "" : pct((*it->second)["lfr"]));
    }
    t.row(row);
  }
  row = {"Minimum LFR&prime;"};
  for (const auto& c : ranking) row.push_back(pct(c["min_lfr"]));
  t.row(row, false);
  row = {"Problematic"};
  for (const auto& c : ranking) row.push_back(c["problematic"].get<bool>() ? "yes" : "");
  t.row(row);
  b << t.done();

  b << "<h2>Records</h2>\n";
  Table rt({"Cell", "Type", "Hit", "Total", "PL&prime;", "LFR&prime;"});
  for (const auto& r : ap["records"])
    rt.row({str(r["cell"]), str(r["type"]), str(r["hit"]), str(r["total"]), pct(r["pl"]), pct(r["lfr"])});
  b << rt.done();

  if (!ap["problematic"].empty()) {
    b << "<h2>Problematic cells</h2>\n";
    for (const auto& c : ap["problematic"]) b << figure_for(s, c.get<std::string>());
  }

  b << "<h2>Markers</h2>\n";
  if (ap["markers"].empty()) {
    b << "<p>No findings.</p>\n";
  } else {
    Table mt({"Pattern", "Type", "Orientation", "Marker", "Instances"});
    for (const auto& m : ap["markers"]) {
      std::string ids;
      for (const auto& i : m["instances"]) ids += (ids.empty() ? "" : " ") + str(i);
      mt.row({str(m["pattern"]), str(m["type"]), str(m["orient"]), rect_text(m["rect"]), ids});
    }
    b << mt.done();
  }

  b << "<h2>Routing</h2>\n";
  b << "<p>Connectivity issues: " << ap["connectivity_issues"].size() << ". Shorts: " << ap["short_issues"].size()
    << ".</p>\n";
  if (!ap["skipped"].empty()) {
    Table st({"Skipped net", "Reason"});
    for (const auto& k : ap["skipped"]) st.row({str(k["net"]), str(k["reason"])});
    b << st.done();
  }
  return page("Auto-placed design", b.str());
}

std::string abutted_page(const json& s) {
  std::ostringstream b;
  if (!s.contains("abutted")) {
    b << "<p>Scenario not run.</p>\n";
    return page("Abutted cells", b.str());
  }
  const json& ab = s["abutted"];
  b << "<p>" << ab["pairs"].get<std::size_t>() << " abutted pairs, full patterns only, no routing.</p>\n";
  b << "<h2>Violations</h2>\n";
  std::set<std::string> cells;
  if (ab["violations"].empty()) {
    b << "<p>No findings.</p>\n";
  } else {
    Table t({"Slot", "Left", "Right", "Pattern", "Type", "Orientation", "Marker"});
    for (const auto& v : ab["violations"]) {
      t.row({str(v["slot"]), str(v["left"]) + " " + str(v["left_orient"]), str(v["right"]) + " " + str(v["right_orient"]),
             str(v["pattern"]), str(v["type"]), str(v["orient"]), rect_text(v["rect"])},
            true);
      for (const char* side : {"left", "right"})
        if (!v[side].get<std::string>().empty()) cells.insert(v[side].get<std::string>());
    }
    b << t.done();
    for (const auto& c : cells) b << figure_for(s, c);
  }
  b << "<h2>Pairs not placed</h2>\n";
  if (ab["omitted"].empty()) {
    b << "<p>None.</p>\n";
  } else {
    Table t({"Left", "Right", "Constraint"});
    for (const auto& o : ab["omitted"])
      t.row({str(o["left"]) + " " + str(o["left_orient"]), str(o["right"]) + " " + str(o["right_orient"]),
             str(o["constraint"])});
    b << t.done();
  }
  return page("Abutted cells", b.str());
}

std::string index_page(const json& s) {
  std::ostringstream b;
  const json& cfg = s["config"];
  b << "<p>Library " << str(cfg["library"]) << ", deck " << str(cfg["deck"]);
  if (!cfg["process"].get<std::string>().empty()) b << " (" << str(cfg["process"]) << ")";
  b << ", seed " << str(cfg["seed"]) << ".</p>\n";
  const json& f = s["findings"];
  if (f["status"].get<int>() == 0) {
    b << "<p>No findings.</p>\n";
    return page("Standard cell verification", b.str());
  }
  Table t({"Scenario", "Findings"});
  if (s.contains("standalone"))
    t.row({"<a href=\"standalone.html\">Standalone</a>", str(f["standalone_markers"]) + " markers"},
          f["standalone_markers"].get<std::int64_t>() > 0);
  if (s.contains("autoplace"))
    t.row({"<a href=\"autoplace.html\">Auto-placed</a>", str(f["problematic_cells"]) + " problematic cells"},
          f["problematic_cells"].get<std::int64_t>() > 0);
  if (s.contains("abutted"))
    t.row({"<a href=\"abutted.html\">Abutted</a>", str(f["abutment_violations"]) + " violations"},
          f["abutment_violations"].get<std::int64_t>() > 0);
  b << t.done();
  return page("Standard cell verification", b.str());
}

const std::map<std::string, std::string> kLayerColors = {
    {"M1", "#1f77b4"}, {"V1", "#d62728"}, {"M2", "#2ca02c"}, {"V2", "#9467bd"}, {"M3", "#ff7f0e"}};

std::string color_of(const std::string& layer) {
  auto it = kLayerColors.find(layer);
  return it == kLayerColors.end() ? "#7f7f7f" : it->second;
}

std::string cell_svg(const std::string& name, const json& c) {
  Rect view{0, 0, c["width"].get<Coord>(), c["height"].get<Coord>()};
  for (const auto& m : c["markers"]) view = view.hull(json_rect(m["rect"]));
  view = view.expanded(20);
  Coord legend_h = 20 * static_cast<Coord>(kLayerColors.size() + 3);
  Coord w = view.width(), h = view.height() + legend_h;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<title>" << esc(name) << "</title>\n";
  // Layout y grows upward; flip into SVG space.
  os << "<g transform=\"translate(" << -view.x_lo << ' ' << view.y_hi << ") scale(1 -1)\">\n";
  auto rect = [&](const Rect& r, const std::string& attrs) {
    os << "<rect x=\"" << r.x_lo << "\" y=\"" << r.y_lo << "\" width=\"" << r.width() << "\" height=\"" << r.height()
       << "\" " << attrs << "/>\n";
  };
  rect(json_rect(json::array({0, 0, c["width"], c["height"]})), "fill=\"none\" stroke=\"#000\" stroke-width=\"2\"");
  for (const auto& [layer, rects] : c["layers"].items())
    for (const auto& r : rects) rect(json_rect(r), "fill=\"" + color_of(layer) + "\" fill-opacity=\"0.45\"");
  for (const auto& [layer, rects] : c["obstructions"].items())
    for (const auto& r : rects)
      rect(json_rect(r), "fill=\"none\" stroke=\"" + color_of(layer) + "\" stroke-dasharray=\"2 2\"");
  for (const auto& m : c["markers"])
    rect(json_rect(m["rect"]), "fill=\"none\" stroke=\"#000\" stroke-width=\"2\" stroke-dasharray=\"8 4\"");
  os << "</g>\n";
  Coord y = view.height() + 16;
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const auto& [layer, color] : kLayerColors) {
    os << "<rect x=\"4\" y=\"" << y - 10 << "\" width=\"12\" height=\"12\" fill=\"" << color
       << "\" fill-opacity=\"0.45\"/><text x=\"22\" y=\"" << y << "\">" << layer << "</text>\n";
    y += 20;
  }
  os << "<text x=\"4\" y=\"" << y << "\">dashed black: marker; dotted: obstruction; solid black: PR boundary</text>\n";
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace

std::map<std::string, std::string> render_report(const json& summary) {
  std::map<std::string, std::string> files;
  files["summary.json"] = summary_text(summary);
  files["index.html"] = index_page(summary);
  files["standalone.html"] = standalone_page(summary);
  files["autoplace.html"] = autoplace_page(summary);
  files["abutted.html"] = abutted_page(summary);
  for (const auto& [name, c] : summary.at("cells").items()) files["cells/" + name + ".svg"] = cell_svg(name, c);
  return files;
}

void write_report(const std::map<std::string, std::string>& files, const std::filesystem::path& dir) {
  for (const auto& [rel, content] : files) write_file(dir / rel, content);
}

}  // namespace lithocheck
