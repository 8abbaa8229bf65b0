#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lithocheck {

// Database units, 1 unit = 1 nm.
using Coord = std::int64_t;

struct Point {
  Coord x = 0;
  Coord y = 0;

  auto operator<=>(const Point&) const = default;
};

// Half-open box [x_lo, x_hi) x [y_lo, y_hi). Stored rects are never degenerate.
struct Rect {
  Coord x_lo = 0;
  Coord y_lo = 0;
  Coord x_hi = 0;
  Coord y_hi = 0;

  Coord width() const { return x_hi - x_lo; }
  Coord height() const { return y_hi - y_lo; }
  Coord area() const { return width() * height(); }
  bool valid() const { return x_lo < x_hi && y_lo < y_hi; }

  // Positive-area intersection.
  bool overlaps(const Rect& o) const {
    return x_lo < o.x_hi && o.x_lo < x_hi && y_lo < o.y_hi && o.y_lo < y_hi;
  }
  // Closed-box intersection (edge or corner contact counts).
  bool touches(const Rect& o) const {
    return x_lo <= o.x_hi && o.x_lo <= x_hi && y_lo <= o.y_hi && o.y_lo <= y_hi;
  }
  bool contains(const Rect& o) const {
    return x_lo <= o.x_lo && o.x_hi <= x_hi && y_lo <= o.y_lo && o.y_hi <= y_hi;
  }
  bool contains(Point p) const { return x_lo <= p.x && p.x <= x_hi && y_lo <= p.y && p.y <= y_hi; }

  std::optional<Rect> intersection(const Rect& o) const;
  Rect expanded(Coord d) const { return {x_lo - d, y_lo - d, x_hi + d, y_hi + d}; }
  Rect translated(Coord dx, Coord dy) const { return {x_lo + dx, y_lo + dy, x_hi + dx, y_hi + dy}; }
  Rect hull(const Rect& o) const;

  auto operator<=>(const Rect&) const = default;
};

// Throws std::invalid_argument for degenerate input.
Rect make_rect(Coord x1, Coord y1, Coord x2, Coord y2);

std::string to_string(const Rect& r);

enum class Orientation : std::uint8_t { N, FN, FS, S };

inline constexpr Orientation kAllOrientations[] = {Orientation::N, Orientation::FN, Orientation::FS,
                                                   Orientation::S};

std::string_view to_string(Orientation o);
std::optional<Orientation> parse_orientation(std::string_view s);
bool flips_x(Orientation o);
bool flips_y(Orientation o);
Orientation compose(Orientation outer, Orientation inner);

// p -> orient(p) + (dx, dy), where orient mirrors about the axes through the origin.
struct Transform {
  Orientation orient = Orientation::N;
  Coord dx = 0;
  Coord dy = 0;

  Point apply(Point p) const;
  Rect apply(const Rect& r) const;
  Transform inverse() const;
  // (*this) after inner.
  Transform compose(const Transform& inner) const;

  // Transform that places a w x h box anchored at the origin so that its
  // oriented image has its lower-left corner at (x, y).
  static Transform placing(Orientation o, Coord x, Coord y, Coord w, Coord h);

  auto operator<=>(const Transform&) const = default;
};

enum class BoolOp : std::uint8_t { And, Or, Xor, Diff };

// Union of rectangles. In canonical form the rects are pairwise disjoint,
// form the maximal horizontal-slab decomposition of the covered point set,
// and are sorted by (y_lo, x_lo); two canonical sets cover the same points
// iff their rect lists are equal.
class RectSet {
 public:
  RectSet() = default;
  // Raw, possibly overlapping rects; throws std::invalid_argument on a degenerate rect.
  explicit RectSet(std::vector<Rect> rects);
  RectSet(std::initializer_list<Rect> rects) : RectSet(std::vector<Rect>(rects)) {}

  static RectSet canonical_of(std::vector<Rect> rects);

  const std::vector<Rect>& rects() const { return rects_; }
  bool canonical() const { return canonical_; }
  bool empty() const { return rects_.empty(); }
  std::size_t size() const { return rects_.size(); }
  // Area of the covered point set.
  Coord area() const;
  std::optional<Rect> bbox() const;
  // True when the unit cell [x, x+1) x [y, y+1) is covered.
  bool covers_cell(Coord x, Coord y) const;

  // Point-set equality.
  friend bool operator==(const RectSet& a, const RectSet& b);

 private:
  struct CanonicalTag {};
  RectSet(std::vector<Rect> rects, CanonicalTag) : rects_(std::move(rects)), canonical_(true) {}

  std::vector<Rect> rects_;
  bool canonical_ = true;

  friend RectSet sweep_combine(std::span<const Rect>, std::span<const Rect>, BoolOp);
};

RectSet canonicalize(const RectSet& s);
RectSet boolean(const RectSet& a, const RectSet& b, BoolOp op);
RectSet apply_transform(const RectSet& s, const Transform& t);
RectSet clip(const RectSet& s, const Rect& window);
RectSet translate(const RectSet& s, Coord dx, Coord dy);

inline RectSet operator|(const RectSet& a, const RectSet& b) { return boolean(a, b, BoolOp::Or); }
inline RectSet operator&(const RectSet& a, const RectSet& b) { return boolean(a, b, BoolOp::And); }
inline RectSet operator^(const RectSet& a, const RectSet& b) { return boolean(a, b, BoolOp::Xor); }
inline RectSet operator-(const RectSet& a, const RectSet& b) { return boolean(a, b, BoolOp::Diff); }

// a is a subset of b.
bool subset_of(const RectSet& a, const RectSet& b);

// Maximal connected shapes under edge adjacency: rects sharing positive area or
// a boundary segment of positive length are connected; corner contact is not.
// Components come out in canonical order of their first rect.
std::vector<RectSet> connected_components(const RectSet& s);

// Component labels for an arbitrary rect list under the same adjacency rule.
// Returns one label per input rect, labels dense from 0.
std::vector<std::size_t> label_components(std::span<const Rect> rects);

}  // namespace lithocheck
