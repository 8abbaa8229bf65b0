#include "lithocheck/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lithocheck/task_pool.hpp"
#include "lithocheck/text_format.hpp"

namespace lithocheck {

std::string_view to_string(MatchKind k) { return k == MatchKind::Full ? "full_match" : "partial_match"; }

bool marker_less(const Marker& a, const Marker& b) {
  return std::tie(a.rect.x_lo, a.rect.y_lo, a.orient, a.pattern_id, a.rect.x_hi, a.rect.y_hi, a.type_id, a.kind) <
         std::tie(b.rect.x_lo, b.rect.y_lo, b.orient, b.pattern_id, b.rect.x_hi, b.rect.y_hi, b.type_id, b.kind);
}

void sort_markers(std::vector<Marker>& markers) {
  std::ranges::sort(markers, marker_less);
  markers.erase(std::unique(markers.begin(), markers.end()), markers.end());
}

std::vector<std::string> MatchPattern::layers() const {
  std::set<std::string> out;
  for (const auto& [l, _] : solids) out.insert(l);
  for (const auto& [l, _] : dontcare) out.insert(l);
  return {out.begin(), out.end()};
}

MatchPattern to_match_pattern(const WeakpointPattern& p) {
  return {p.id, p.type_id, MatchKind::Full, p.extent, p.solids, p.dontcare};
}

MatchPattern to_match_pattern(const PartialPattern& p) {
  return {p.id, p.type_id, MatchKind::Partial, p.extent, p.solids, p.dontcare};
}

bool is_corner_mask(CornerMask m) {
  switch (m) {
    case 0b0000:
    case 0b1111:
    case 0b0011:  // half-planes: straight boundary, no corner
    case 0b0110:
    case 0b1100:
    case 0b1001: return false;
    default: return true;
  }
}

LayoutIndex::LayoutIndex(FlatLayout layout) : die_(layout.die) {
  Rect domain = die_;
  for (const auto& [_, s] : layout.layers)
    if (auto b = s.bbox()) domain = domain.hull(*b);
  Coord bin = std::max<Coord>(16, std::max(domain.width(), domain.height()) / 200);
  for (auto& [name, shapes] : layout.layers) {
    LayerData& d = layers_[name];
    d.shapes = canonicalize(shapes);
    d.index.reset(domain, bin);
    for (const auto& r : d.shapes.rects()) d.index.insert(r);
  }
  for (auto& [name, d] : layers_) {
    for (const auto& r : d.shapes.rects()) {
      for (Point q : {Point{r.x_lo, r.y_lo}, Point{r.x_hi, r.y_lo}, Point{r.x_lo, r.y_hi}, Point{r.x_hi, r.y_hi}}) {
        CornerMask m = static_cast<CornerMask>(covered(d, q.x, q.y) | covered(d, q.x - 1, q.y) << 1 |
                                               covered(d, q.x - 1, q.y - 1) << 2 | covered(d, q.x, q.y - 1) << 3);
        if (is_corner_mask(m)) d.corners[m].push_back(q);
      }
    }
    for (auto& v : d.corners) {
      std::ranges::sort(v);
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }
}

bool LayoutIndex::covered(const LayerData& d, Coord x, Coord y) const {
  Rect cell{x, y, x + 1, y + 1};
  bool hit = false;
  d.index.visit(cell, [&](std::size_t, const Rect& r) { hit = hit || r.contains(cell); });
  return hit;
}

const RectSet& LayoutIndex::shapes(std::string_view layer) const { return layers_.find(layer)->second.shapes; }

const std::vector<Point>& LayoutIndex::corners(std::string_view layer, CornerMask mask) const {
  return layers_.find(layer)->second.corners[mask & 0xF];
}

CornerMask LayoutIndex::mask_at(std::string_view layer, Point p) const {
  const auto& d = layers_.find(layer)->second;
  return static_cast<CornerMask>(covered(d, p.x, p.y) | covered(d, p.x - 1, p.y) << 1 |
                                 covered(d, p.x - 1, p.y - 1) << 2 | covered(d, p.x, p.y - 1) << 3);
}

namespace {

// Pattern geometry for one orientation, split into the region that must match
// exactly (care) and the geometry required inside it.
struct LayerCheck {
  std::string layer;
  RectSet care;
  RectSet required;
};

struct OrientedPattern {
  Orientation orient;
  Rect extent;
  std::vector<LayerCheck> checks;
};

OrientedPattern orient_pattern(const MatchPattern& p, Orientation o) {
  OrientedPattern op{o, p.extent, {}};
  Transform t = Transform::placing(o, 0, 0, p.extent.width(), p.extent.height());
  RectSet whole{p.extent};
  for (const auto& layer : p.layers()) {
    RectSet solids, dc;
    if (auto it = p.solids.find(layer); it != p.solids.end()) solids = apply_transform(it->second, t);
    if (auto it = p.dontcare.find(layer); it != p.dontcare.end()) dc = apply_transform(it->second, t);
    RectSet care = whole - dc;
    if (care.empty()) continue;
    RectSet required = solids & care;
    op.checks.push_back({layer, std::move(care), std::move(required)});
  }
  // Layers with required geometry reject faster.
  std::ranges::stable_sort(op.checks, {}, [](const LayerCheck& c) { return c.required.empty(); });
  return op;
}

bool verify(const LayoutIndex& layout, const OrientedPattern& op, Coord tx, Coord ty) {
  Rect window = op.extent.translated(tx, ty);
  std::vector<Rect> local;
  for (const auto& c : op.checks) {
    local.clear();
    layout.visit_overlapping(c.layer, window, [&](const Rect& r) {
      local.push_back(r.intersection(window)->translated(-tx, -ty));
    });
    if (local.empty()) {
      if (!c.required.empty()) return false;
      continue;
    }
    RectSet seen = RectSet::canonical_of(local);
    if ((seen & c.care) != c.required) return false;
  }
  return true;
}

struct Anchor {
  std::size_t check = 0;
  Point at;
  CornerMask mask = 0;
};

CornerMask mask_of(const RectSet& s, Point q) {
  return static_cast<CornerMask>(s.covers_cell(q.x, q.y) | s.covers_cell(q.x - 1, q.y) << 1 |
                                 s.covers_cell(q.x - 1, q.y - 1) << 2 | s.covers_cell(q.x, q.y - 1) << 3);
}

bool in_care_all_around(const RectSet& care, Point q) { return mask_of(care, q) == 0b1111; }

// A corner of the required geometry whose neighbourhood is entirely care:
// the layout must show the same corner there, which pins the translation.
std::optional<Anchor> best_anchor(const LayoutIndex& layout, const OrientedPattern& op) {
  std::optional<Anchor> best;
  std::size_t best_count = 0;
  for (std::size_t ci = 0; ci < op.checks.size(); ++ci) {
    const auto& c = op.checks[ci];
    for (const auto& r : c.required.rects()) {
      for (Point q : {Point{r.x_lo, r.y_lo}, Point{r.x_hi, r.y_lo}, Point{r.x_lo, r.y_hi}, Point{r.x_hi, r.y_hi}}) {
        if (!in_care_all_around(c.care, q)) continue;
        CornerMask m = mask_of(c.required, q);
        if (!is_corner_mask(m)) continue;
        std::size_t count = layout.corners(c.layer, m).size();
        if (!best || count < best_count) {
          best = Anchor{ci, q, m};
          best_count = count;
        }
      }
    }
  }
  return best;
}

// Pattern coordinate of a required-geometry edge that has care on both sides:
// a layout edge must sit there. `vertical` selects x edges.
std::optional<std::pair<std::size_t, Coord>> care_edge(const OrientedPattern& op, bool vertical) {
  for (std::size_t ci = 0; ci < op.checks.size(); ++ci) {
    const auto& c = op.checks[ci];
    for (const auto& r : c.required.rects()) {
      Coord lo = vertical ? r.y_lo : r.x_lo;
      Coord hi = vertical ? r.y_hi : r.x_hi;
      std::vector<Coord> samples{lo};
      for (const RectSet* s : {&c.care, &c.required})
        for (const auto& o : s->rects()) {
          std::array<Coord, 2> vs = vertical ? std::array<Coord, 2>{o.y_lo, o.y_hi} : std::array<Coord, 2>{o.x_lo, o.x_hi};
          for (Coord v : vs)
            if (lo < v && v < hi) samples.push_back(v);
        }
      struct Side {
        Coord edge, inside, outside;
      };
      Coord a = vertical ? r.x_lo : r.y_lo, b = vertical ? r.x_hi : r.y_hi;
      const Side sides[2] = {{a, a, a - 1}, {b, b - 1, b}};
      for (const auto& side : sides) {
        for (Coord s : samples) {
          Coord ox = vertical ? side.outside : s, oy = vertical ? s : side.outside;
          if (c.care.covers_cell(ox, oy) && !c.required.covers_cell(ox, oy)) return std::pair{ci, side.edge};
        }
      }
    }
  }
  return std::nullopt;
}

// Integer translations grouped so the match predicate is constant inside
// each group; `lo` is the representative.
struct AxisElem {
  Coord lo, hi;
};

std::vector<AxisElem> points_from(std::vector<Coord> values, Coord lo, Coord hi) {
  std::erase_if(values, [&](Coord v) { return v < lo || v > hi; });
  std::ranges::sort(values);
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<AxisElem> out;
  out.reserve(values.size());
  for (Coord v : values) out.push_back({v, v});
  return out;
}

std::vector<AxisElem> critical_elems(const std::vector<Coord>& layout_coords, const std::vector<Coord>& pattern_coords,
                                     Coord lo, Coord hi) {
  std::vector<Coord> crit{lo, hi};
  for (Coord l : layout_coords)
    for (Coord p : pattern_coords)
      if (Coord v = l - p; v > lo && v < hi) crit.push_back(v);
  std::ranges::sort(crit);
  crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
  std::vector<AxisElem> out;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    out.push_back({crit[i], crit[i]});
    if (i + 1 < crit.size() && crit[i] + 1 <= crit[i + 1] - 1) out.push_back({crit[i] + 1, crit[i + 1] - 1});
  }
  return out;
}

std::vector<Coord> pattern_coords(const OrientedPattern& op, bool x_axis) {
  std::vector<Coord> out = x_axis ? std::vector<Coord>{0, op.extent.width()} : std::vector<Coord>{0, op.extent.height()};
  for (const auto& c : op.checks)
    for (const RectSet* s : {&c.care, &c.required})
      for (const auto& r : s->rects()) {
        out.push_back(x_axis ? r.x_lo : r.y_lo);
        out.push_back(x_axis ? r.x_hi : r.y_hi);
      }
  std::ranges::sort(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Coord> layout_coords(const LayoutIndex& layout, const std::vector<std::string>& layers, const Rect& band,
                                 bool x_axis) {
  std::vector<Coord> out;
  for (const auto& l : layers)
    layout.visit_overlapping(l, band, [&](const Rect& r) {
      out.push_back(x_axis ? r.x_lo : r.y_lo);
      out.push_back(x_axis ? r.x_hi : r.y_hi);
    });
  std::ranges::sort(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void match_oriented(const LayoutIndex& layout, const MatchPattern& p, const OrientedPattern& op,
                    std::vector<Marker>& out) {
  const Rect& die = layout.die();
  Coord w = op.extent.width(), h = op.extent.height();
  Coord x_lo = die.x_lo, x_hi = die.x_hi - w, y_lo = die.y_lo, y_hi = die.y_hi - h;
  if (x_lo > x_hi || y_lo > y_hi) return;
  auto emit = [&](Coord tx, Coord ty) {
    out.push_back({op.extent.translated(tx, ty), p.id, p.type_id, op.orient, p.kind});
  };

  if (auto anchor = best_anchor(layout, op)) {
    const auto& check = op.checks[anchor->check];
    std::vector<Point> cands;
    for (Point c : layout.corners(check.layer, anchor->mask)) {
      Point t{c.x - anchor->at.x, c.y - anchor->at.y};
      if (t.x >= x_lo && t.x <= x_hi && t.y >= y_lo && t.y <= y_hi) cands.push_back(t);
    }
    std::ranges::sort(cands);
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (Point t : cands)
      if (verify(layout, op, t.x, t.y)) emit(t.x, t.y);
    return;
  }

  // No pinning corner: enumerate per axis. A care edge pins its axis to layout
  // edge coordinates; otherwise use the critical-value arrangement.
  std::vector<std::string> layers;
  for (const auto& c : op.checks) layers.push_back(c.layer);
  auto xedge = care_edge(op, true);
  auto yedge = care_edge(op, false);
  Rect whole = die;
  std::vector<AxisElem> ys;
  if (yedge) {
    std::vector<Coord> vals;
    for (Coord v : layout_coords(layout, {op.checks[yedge->first].layer}, whole, false)) vals.push_back(v - yedge->second);
    ys = points_from(std::move(vals), y_lo, y_hi);
  } else {
    ys = critical_elems(layout_coords(layout, layers, whole, false), pattern_coords(op, false), y_lo, y_hi);
  }
  auto px = pattern_coords(op, true);
  for (const auto& ye : ys) {
    Rect band{die.x_lo, ye.lo, die.x_hi, ye.hi + h};
    std::vector<AxisElem> xs;
    if (xedge) {
      std::vector<Coord> vals;
      for (Coord v : layout_coords(layout, {op.checks[xedge->first].layer}, band, true)) vals.push_back(v - xedge->second);
      xs = points_from(std::move(vals), x_lo, x_hi);
    } else {
      xs = critical_elems(layout_coords(layout, layers, band, true), px, x_lo, x_hi);
    }
    for (const auto& xe : xs) {
      if (!verify(layout, op, xe.lo, ye.lo)) continue;
      for (Coord ty = ye.lo; ty <= ye.hi; ++ty)
        for (Coord tx = xe.lo; tx <= xe.hi; ++tx) emit(tx, ty);
    }
  }
}

}  // namespace

std::vector<Marker> match_pattern(const LayoutIndex& layout, const MatchPattern& pattern,
                                  std::span<const Orientation> orientations) {
  for (const auto& l : pattern.layers())
    if (!layout.has_layer(l))
      throw std::invalid_argument("pattern '" + pattern.id + "' references unknown layer '" + l + "'");
  std::vector<Marker> out;
  for (Orientation o : orientations) match_oriented(layout, pattern, orient_pattern(pattern, o), out);
  sort_markers(out);
  return out;
}

std::vector<MatchPattern> deck_match_patterns(const PatternDeck& deck, DeckMode mode, PartialMode partial_mode) {
  std::vector<MatchPattern> out;
  for (const auto& p : deck.patterns) {
    if (mode != DeckMode::Partial) out.push_back(to_match_pattern(p));
    if (mode == DeckMode::Full) continue;
    for (const auto& part : generate_partials(p, deck.margin, partial_mode)) {
      bool has_solid = std::ranges::any_of(part.solids, [](const auto& kv) { return !kv.second.empty(); });
      if (has_solid) out.push_back(to_match_pattern(part));
    }
  }
  return out;
}

std::vector<Marker> match_deck(const LayoutIndex& layout, const PatternDeck& deck, const DeckMatchOptions& options) {
  auto patterns = deck_match_patterns(deck, options.mode, options.partial_mode);
  for (const auto& p : patterns)
    for (const auto& l : p.layers())
      if (!layout.has_layer(l)) throw std::invalid_argument("pattern '" + p.id + "' references unknown layer '" + l + "'");
  const auto& orients = options.orientations;
  std::vector<std::vector<Marker>> parts(patterns.size() * orients.size());
  auto task = [&](std::size_t i) {
    const auto& p = patterns[i / orients.size()];
    match_oriented(layout, p, orient_pattern(p, orients[i % orients.size()]), parts[i]);
  };
  if (options.pool) {
    options.pool->parallel_for(parts.size(), task);
  } else {
    for (std::size_t i = 0; i < parts.size(); ++i) task(i);
  }
  std::vector<Marker> out;
  for (auto& v : parts) out.insert(out.end(), v.begin(), v.end());
  sort_markers(out);
  return out;
}

std::string serialize_markers(const std::vector<Marker>& markers) {
  std::ostringstream os;
  for (const auto& m : markers)
    os << "MARKER " << m.pattern_id << ' ' << m.type_id << ' ' << to_string(m.kind) << ' ' << to_string(m.orient)
       << ' ' << format_rect(m.rect) << '\n';
  return os.str();
}

std::vector<Marker> parse_markers(std::string_view text, const std::string& source) {
  StatementReader rd(text, source);
  std::vector<Marker> out;
  while (!rd.done()) {
    const Statement& st = rd.next();
    rd.expect_word(st, 0, "MARKER");
    rd.expect_size(st, 9);
    Marker m;
    m.pattern_id = rd.word(st, 1);
    m.type_id = static_cast<int>(rd.positive(st, 2));
    auto kind = st.tokens[3].text;
    if (kind == "full_match") m.kind = MatchKind::Full;
    else if (kind == "partial_match") m.kind = MatchKind::Partial;
    else rd.fail(st, 3, "kind must be full_match or partial_match");
    m.orient = rd.orientation(st, 4);
    m.rect = rd.rect(st, 5);
    out.push_back(std::move(m));
  }
  sort_markers(out);
  return out;
}

}  // namespace lithocheck
