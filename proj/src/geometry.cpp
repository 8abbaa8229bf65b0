#include "lithocheck/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lithocheck {

std::optional<Rect> Rect::intersection(const Rect& o) const {
  Rect r{std::max(x_lo, o.x_lo), std::max(y_lo, o.y_lo), std::min(x_hi, o.x_hi), std::min(y_hi, o.y_hi)};
  if (!r.valid()) return std::nullopt;
  return r;
}

Rect Rect::hull(const Rect& o) const {
  return {std::min(x_lo, o.x_lo), std::min(y_lo, o.y_lo), std::max(x_hi, o.x_hi), std::max(y_hi, o.y_hi)};
}

Rect make_rect(Coord x1, Coord y1, Coord x2, Coord y2) {
  Rect r{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
  if (!r.valid()) throw std::invalid_argument("degenerate rectangle " + to_string(r));
  return r;
}

std::string to_string(const Rect& r) {
  return "(" + std::to_string(r.x_lo) + "," + std::to_string(r.y_lo) + "," + std::to_string(r.x_hi) + "," +
         std::to_string(r.y_hi) + ")";
}

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::N: return "N";
    case Orientation::FN: return "FN";
    case Orientation::FS: return "FS";
    case Orientation::S: return "S";
  }
  return "?";
}

std::optional<Orientation> parse_orientation(std::string_view s) {
  for (auto o : kAllOrientations)
    if (to_string(o) == s) return o;
  return std::nullopt;
}

bool flips_x(Orientation o) { return o == Orientation::FN || o == Orientation::S; }
bool flips_y(Orientation o) { return o == Orientation::FS || o == Orientation::S; }

static Orientation from_flips(bool fx, bool fy) {
  if (fx && fy) return Orientation::S;
  if (fx) return Orientation::FN;
  if (fy) return Orientation::FS;
  return Orientation::N;
}

Orientation compose(Orientation outer, Orientation inner) {
  return from_flips(flips_x(outer) != flips_x(inner), flips_y(outer) != flips_y(inner));
}

Point Transform::apply(Point p) const {
  Coord x = flips_x(orient) ? -p.x : p.x;
  Coord y = flips_y(orient) ? -p.y : p.y;
  return {x + dx, y + dy};
}

Rect Transform::apply(const Rect& r) const {
  Point a = apply(Point{r.x_lo, r.y_lo});
  Point b = apply(Point{r.x_hi, r.y_hi});
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
}

Transform Transform::inverse() const {
  Transform lin{orient, 0, 0};
  Point d = lin.apply(Point{dx, dy});
  return {orient, -d.x, -d.y};
}

Transform Transform::compose(const Transform& inner) const {
  Point d = apply(Point{inner.dx, inner.dy});
  return {lithocheck::compose(orient, inner.orient), d.x, d.y};
}

Transform Transform::placing(Orientation o, Coord x, Coord y, Coord w, Coord h) {
  return {o, x + (flips_x(o) ? w : 0), y + (flips_y(o) ? h : 0)};
}

RectSet::RectSet(std::vector<Rect> rects) : rects_(std::move(rects)), canonical_(rects_.empty()) {
  for (const auto& r : rects_)
    if (!r.valid()) throw std::invalid_argument("degenerate rectangle " + to_string(r));
}

RectSet RectSet::canonical_of(std::vector<Rect> rects) { return canonicalize(RectSet(std::move(rects))); }

Coord RectSet::area() const {
  if (!canonical_) return canonicalize(*this).area();
  Coord a = 0;
  for (const auto& r : rects_) a += r.area();
  return a;
}

std::optional<Rect> RectSet::bbox() const {
  if (rects_.empty()) return std::nullopt;
  Rect b = rects_.front();
  for (const auto& r : rects_) b = b.hull(r);
  return b;
}

bool RectSet::covers_cell(Coord x, Coord y) const {
  Rect cell{x, y, x + 1, y + 1};
  return std::ranges::any_of(rects_, [&](const Rect& r) { return r.contains(cell); });
}

bool operator==(const RectSet& a, const RectSet& b) {
  if (a.canonical_ && b.canonical_) return a.rects_ == b.rects_;
  return canonicalize(a).rects_ == canonicalize(b).rects_;
}

namespace {

struct Interval {
  Coord lo;
  Coord hi;
  bool operator==(const Interval&) const = default;
};

// Union of the x-extents of the given rects, sorted and merged (touching intervals merge).
void merged_intervals(const std::vector<const Rect*>& active, std::vector<Interval>& out) {
  out.clear();
  for (const Rect* r : active) out.push_back({r->x_lo, r->x_hi});
  std::ranges::sort(out, {}, &Interval::lo);
  std::size_t n = 0;
  for (const auto& iv : out) {
    if (n > 0 && iv.lo <= out[n - 1].hi) {
      out[n - 1].hi = std::max(out[n - 1].hi, iv.hi);
    } else {
      out[n++] = iv;
    }
  }
  out.resize(n);
}

bool apply_op(BoolOp op, bool a, bool b) {
  switch (op) {
    case BoolOp::And: return a && b;
    case BoolOp::Or: return a || b;
    case BoolOp::Xor: return a != b;
    case BoolOp::Diff: return a && !b;
  }
  return false;
}

void combine_intervals(const std::vector<Interval>& a, const std::vector<Interval>& b, BoolOp op,
                       std::vector<Interval>& out) {
  out.clear();
  std::vector<Coord> xs;
  xs.reserve(2 * (a.size() + b.size()));
  for (const auto& iv : a) xs.insert(xs.end(), {iv.lo, iv.hi});
  for (const auto& iv : b) xs.insert(xs.end(), {iv.lo, iv.hi});
  std::ranges::sort(xs);
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    Coord x = xs[k];
    while (ia < a.size() && a[ia].hi <= x) ++ia;
    while (ib < b.size() && b[ib].hi <= x) ++ib;
    bool in_a = ia < a.size() && a[ia].lo <= x;
    bool in_b = ib < b.size() && b[ib].lo <= x;
    if (!apply_op(op, in_a, in_b)) continue;
    if (!out.empty() && out.back().hi == x) {
      out.back().hi = xs[k + 1];
    } else {
      out.push_back({x, xs[k + 1]});
    }
  }
}

class ActiveSet {
 public:
  explicit ActiveSet(std::span<const Rect> rects) {
    order_.reserve(rects.size());
    for (const auto& r : rects) order_.push_back(&r);
    std::ranges::sort(order_, {}, &Rect::y_lo);
  }

  void advance_to(Coord y) {
    std::erase_if(active_, [y](const Rect* r) { return r->y_hi <= y; });
    while (next_ < order_.size() && order_[next_]->y_lo <= y) {
      if (order_[next_]->y_hi > y) active_.push_back(order_[next_]);
      ++next_;
    }
  }

  const std::vector<const Rect*>& active() const { return active_; }

 private:
  std::vector<const Rect*> order_;
  std::vector<const Rect*> active_;
  std::size_t next_ = 0;
};

struct OpenRect {
  Interval iv;
  Coord y_lo;
};

}  // namespace

RectSet sweep_combine(std::span<const Rect> a, std::span<const Rect> b, BoolOp op) {
  std::vector<Coord> ys;
  ys.reserve(2 * (a.size() + b.size()));
  for (const auto& r : a) ys.insert(ys.end(), {r.y_lo, r.y_hi});
  for (const auto& r : b) ys.insert(ys.end(), {r.y_lo, r.y_hi});
  std::ranges::sort(ys);
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  ActiveSet act_a(a), act_b(b);
  std::vector<Interval> iv_a, iv_b, iv_out;
  std::vector<OpenRect> open, next_open;
  std::vector<Rect> result;

  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    Coord y0 = ys[k], y1 = ys[k + 1];
    act_a.advance_to(y0);
    act_b.advance_to(y0);
    merged_intervals(act_a.active(), iv_a);
    merged_intervals(act_b.active(), iv_b);
    combine_intervals(iv_a, iv_b, op, iv_out);

    // Continue open rects whose interval reappears unchanged; close the rest.
    next_open.clear();
    std::size_t i = 0;
    for (const auto& iv : iv_out) {
      while (i < open.size() && open[i].iv.lo < iv.lo) {
        result.push_back({open[i].iv.lo, open[i].y_lo, open[i].iv.hi, y0});
        ++i;
      }
      if (i < open.size() && open[i].iv == iv) {
        next_open.push_back(open[i]);
        ++i;
      } else {
        next_open.push_back({iv, y0});
      }
    }
    for (; i < open.size(); ++i) result.push_back({open[i].iv.lo, open[i].y_lo, open[i].iv.hi, y0});
    std::swap(open, next_open);
    (void)y1;
  }
  if (!ys.empty())
    for (const auto& o : open) result.push_back({o.iv.lo, o.y_lo, o.iv.hi, ys.back()});

  std::ranges::sort(result, [](const Rect& l, const Rect& r) {
    return std::tie(l.y_lo, l.x_lo) < std::tie(r.y_lo, r.x_lo);
  });
  return RectSet(std::move(result), RectSet::CanonicalTag{});
}

RectSet canonicalize(const RectSet& s) {
  if (s.canonical()) return s;
  return sweep_combine(s.rects(), {}, BoolOp::Or);
}

RectSet boolean(const RectSet& a, const RectSet& b, BoolOp op) {
  if (b.empty() && (op == BoolOp::Or || op == BoolOp::Xor || op == BoolOp::Diff)) return canonicalize(a);
  if (a.empty() && (op == BoolOp::Or || op == BoolOp::Xor)) return canonicalize(b);
  if ((a.empty() || b.empty()) && op == BoolOp::And) return {};
  if (a.empty()) return {};
  return sweep_combine(a.rects(), b.rects(), op);
}

RectSet apply_transform(const RectSet& s, const Transform& t) {
  std::vector<Rect> out;
  out.reserve(s.size());
  for (const auto& r : s.rects()) out.push_back(t.apply(r));
  return RectSet::canonical_of(std::move(out));
}

RectSet clip(const RectSet& s, const Rect& window) {
  std::vector<Rect> out;
  for (const auto& r : s.rects())
    if (auto c = r.intersection(window)) out.push_back(*c);
  return RectSet::canonical_of(std::move(out));
}

RectSet translate(const RectSet& s, Coord dx, Coord dy) {
  return apply_transform(s, Transform{Orientation::N, dx, dy});
}

bool subset_of(const RectSet& a, const RectSet& b) { return boolean(a, b, BoolOp::Diff).empty(); }

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool edge_connected(const Rect& a, const Rect& b) {
  Coord ox = std::min(a.x_hi, b.x_hi) - std::max(a.x_lo, b.x_lo);
  Coord oy = std::min(a.y_hi, b.y_hi) - std::max(a.y_lo, b.y_lo);
  return ox >= 0 && oy >= 0 && (ox > 0 || oy > 0);
}

}  // namespace

std::vector<std::size_t> label_components(std::span<const Rect> rects) {
  std::vector<std::size_t> order(rects.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](std::size_t l, std::size_t r) { return rects[l].x_lo < rects[r].x_lo; });
  DisjointSets ds(rects.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Rect& a = rects[order[i]];
    for (std::size_t j = i + 1; j < order.size() && rects[order[j]].x_lo <= a.x_hi; ++j)
      if (edge_connected(a, rects[order[j]])) ds.unite(order[i], order[j]);
  }
  std::vector<std::size_t> label(rects.size());
  std::vector<std::size_t> remap(rects.size(), SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    std::size_t root = ds.find(i);
    if (remap[root] == SIZE_MAX) remap[root] = next++;
    label[i] = remap[root];
  }
  return label;
}

std::vector<RectSet> connected_components(const RectSet& s) {
  RectSet c = canonicalize(s);
  auto label = label_components(c.rects());
  std::size_t n = label.empty() ? 0 : *std::ranges::max_element(label) + 1;
  std::vector<std::vector<Rect>> groups(n);
  for (std::size_t i = 0; i < c.size(); ++i) groups[label[i]].push_back(c.rects()[i]);
  std::vector<RectSet> out;
  out.reserve(n);
  for (auto& g : groups) out.push_back(RectSet::canonical_of(std::move(g)));
  return out;
}

}  // namespace lithocheck
