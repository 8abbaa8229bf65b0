#include "lithocheck/pattern.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lithocheck/text_format.hpp"

namespace lithocheck {

std::vector<RectSet> WeakpointPattern::polygons(std::string_view layer) const {
  auto it = solids.find(std::string(layer));
  if (it == solids.end()) return {};
  return connected_components(it->second);
}

std::vector<std::string> WeakpointPattern::layers() const {
  std::set<std::string> out;
  for (const auto& [l, _] : solids) out.insert(l);
  for (const auto& [l, _] : dontcare) out.insert(l);
  return {out.begin(), out.end()};
}

const WeakpointPattern* PatternDeck::find(std::string_view id) const {
  for (const auto& p : patterns)
    if (p.id == id) return &p;
  return nullptr;
}

std::vector<int> PatternDeck::type_ids() const {
  std::set<int> ids;
  for (const auto& p : patterns) ids.insert(p.type_id);
  return {ids.begin(), ids.end()};
}

Coord PatternDeck::max_extent_dimension() const {
  Coord m = 0;
  for (const auto& p : patterns) m = std::max({m, p.extent.width(), p.extent.height()});
  return m;
}

namespace {

std::vector<PolygonRef> all_polygons(const WeakpointPattern& p) {
  std::vector<PolygonRef> out;
  for (const auto& [layer, s] : p.solids) {
    auto n = connected_components(s).size();
    for (std::size_t i = 0; i < n; ++i) out.push_back({layer, i});
  }
  return out;
}

WeakpointPattern read_pattern(StatementReader& rd, const Statement& head) {
  rd.expect_size(head, 7);
  rd.expect_word(head, 2, "TYPE");
  rd.expect_word(head, 4, "EXTENT");
  WeakpointPattern p;
  p.id = rd.word(head, 1);
  p.type_id = static_cast<int>(rd.positive(head, 3));
  p.extent = {0, 0, rd.positive(head, 5), rd.positive(head, 6)};

  std::map<std::string, std::vector<Rect>> solids, dontcare;
  bool remove_all = false;
  std::vector<std::pair<const Statement*, PolygonRef>> removable;
  for (;;) {
    const Statement& st = rd.next();
    auto kw = st.keyword();
    if (kw == "SOLID" || kw == "DONTCARE") {
      rd.expect_size(st, 6);
      Rect r = rd.rect(st, 2);
      if (!p.extent.contains(r)) rd.fail(st, 2, "shape lies outside the pattern extent");
      (kw == "SOLID" ? solids : dontcare)[rd.word(st, 1)].push_back(r);
    } else if (kw == "REMOVABLE") {
      if (st.size() == 2 && st.tokens[1].text == "ALL") {
        remove_all = true;
      } else {
        rd.expect_size(st, 3);
        std::int64_t idx = rd.integer(st, 2);
        if (idx < 0) rd.fail(st, 2, "polygon index must be non-negative");
        removable.emplace_back(&st, PolygonRef{rd.word(st, 1), static_cast<std::size_t>(idx)});
      }
    } else if (kw == "END") {
      rd.expect_size(st, 2);
      rd.expect_word(st, 1, "PATTERN");
      break;
    } else {
      rd.fail(st, 0, "unexpected '" + std::string(kw) + "' inside PATTERN");
    }
  }
  for (auto& [l, rects] : solids) p.solids.emplace(l, RectSet::canonical_of(std::move(rects)));
  for (auto& [l, rects] : dontcare) p.dontcare.emplace(l, RectSet::canonical_of(std::move(rects)));
  if (p.solids.empty()) rd.fail(head, 1, "pattern '" + p.id + "' has no solid polygon");

  if (remove_all || removable.empty()) {
    p.removable = all_polygons(p);
  } else {
    for (const auto& [st, ref] : removable) {
      if (ref.index >= p.polygons(ref.layer).size())
        rd.fail(*st, 2, "pattern '" + p.id + "' has no polygon " + std::to_string(ref.index) + " on " + ref.layer);
      p.removable.push_back(ref);
    }
    std::ranges::sort(p.removable);
    p.removable.erase(std::unique(p.removable.begin(), p.removable.end()), p.removable.end());
  }
  return p;
}

void write_shapes(std::ostream& os, std::string_view kw, const LayerShapes& shapes) {
  for (const auto& [layer, s] : shapes)
    for (const auto& r : s.rects()) os << "  " << kw << ' ' << layer << ' ' << format_rect(r) << '\n';
}

}  // namespace

PatternDeck parse_deck(std::string_view text, const std::string& source) {
  StatementReader rd(text, source);
  PatternDeck deck;
  {
    const Statement& st = rd.next();
    rd.expect_word(st, 0, "DECK");
    rd.expect_min_size(st, 2);
    deck.name = rd.word(st, 1);
    for (std::size_t i = 2; i < st.size(); i += 2) {
      if (i + 1 >= st.size()) rd.fail(st, i + 1, "missing value");
      if (st.tokens[i].text == "PROCESS") deck.process = rd.word(st, i + 1);
      else if (st.tokens[i].text == "MARGIN") {
        deck.margin = rd.integer(st, i + 1);
        if (deck.margin < 0) rd.fail(st, i + 1, "margin must be non-negative");
      } else rd.fail(st, i, "expected PROCESS or MARGIN");
    }
  }
  for (;;) {
    const Statement& st = rd.next();
    if (st.keyword() == "PATTERN") {
      WeakpointPattern p = read_pattern(rd, st);
      if (deck.find(p.id)) rd.fail(st, 1, "duplicate pattern id '" + p.id + "'");
      deck.patterns.push_back(std::move(p));
    } else if (st.keyword() == "END") {
      rd.expect_size(st, 2);
      rd.expect_word(st, 1, "DECK");
      break;
    } else {
      rd.fail(st, 0, "unknown statement '" + std::string(st.keyword()) + "'");
    }
  }
  if (!rd.done()) rd.fail(rd.peek(), 0, "content after END DECK");
  std::ranges::sort(deck.patterns, {}, &WeakpointPattern::id);
  return deck;
}

std::string serialize_deck(const PatternDeck& deck) {
  std::ostringstream os;
  os << "DECK " << deck.name;
  if (!deck.process.empty()) os << " PROCESS " << deck.process;
  if (deck.margin != 0) os << " MARGIN " << deck.margin;
  os << '\n';
  for (const auto& p : deck.patterns) {
    os << "PATTERN " << p.id << " TYPE " << p.type_id << " EXTENT " << p.extent.width() << ' ' << p.extent.height()
       << '\n';
    write_shapes(os, "SOLID", p.solids);
    write_shapes(os, "DONTCARE", p.dontcare);
    if (p.removable == all_polygons(p)) {
      os << "  REMOVABLE ALL\n";
    } else {
      for (const auto& r : p.removable) os << "  REMOVABLE " << r.layer << ' ' << r.index << '\n';
    }
    os << "END PATTERN\n";
  }
  os << "END DECK\n";
  return os.str();
}

std::vector<PartialPattern> generate_partials(const WeakpointPattern& p, Coord margin, PartialMode mode) {
  auto refs = p.removable;
  std::ranges::sort(refs);
  std::vector<PartialPattern> out;
  out.reserve(refs.size());
  for (const auto& ref : refs) {
    auto polys = p.polygons(ref.layer);
    if (ref.index >= polys.size())
      throw std::out_of_range("pattern '" + p.id + "': removable polygon " + std::to_string(ref.index) + " on " +
                              ref.layer + " does not exist");
    const RectSet& poly = polys[ref.index];
    Rect bbox = *poly.bbox();

    PartialPattern part;
    part.id = p.id + ".p" + std::to_string(out.size() + 1);
    part.parent_id = p.id;
    part.type_id = p.type_id;
    part.extent = p.extent;
    part.solids = p.solids;
    part.dontcare = p.dontcare;
    // The layer stays in the map even when emptied so it still constrains the window.
    part.solids[ref.layer] = p.solids.at(ref.layer) - poly;
    if (mode == PartialMode::DontCare) {
      auto region = bbox.expanded(margin).intersection(p.extent);
      RectSet& dc = part.dontcare[ref.layer];
      dc = dc | RectSet{*region};
    }
    part.removed = {ref.layer, bbox};
    out.push_back(std::move(part));
  }
  return out;
}

std::string serialize_partials(const std::vector<PartialPattern>& partials) {
  std::ostringstream os;
  for (const auto& p : partials) {
    os << "PARTIAL " << p.id << " PARENT " << p.parent_id << " TYPE " << p.type_id << " EXTENT "
       << p.extent.width() << ' ' << p.extent.height() << '\n';
    os << "  REMOVED " << p.removed.layer << ' ' << format_rect(p.removed.bbox) << '\n';
    write_shapes(os, "SOLID", p.solids);
    write_shapes(os, "DONTCARE", p.dontcare);
    os << "END PARTIAL\n";
  }
  return os.str();
}

}  // namespace lithocheck
