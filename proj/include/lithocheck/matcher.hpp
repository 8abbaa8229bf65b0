#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lithocheck/geometry.hpp"
#include "lithocheck/layout.hpp"
#include "lithocheck/pattern.hpp"
#include "lithocheck/spatial_index.hpp"

namespace lithocheck {

class TaskPool;

enum class MatchKind : std::uint8_t { Full, Partial };

std::string_view to_string(MatchKind k);

struct Marker {
  Rect rect;  // matched extent in layout coordinates
  std::string pattern_id;
  int type_id = 0;
  Orientation orient = Orientation::N;
  MatchKind kind = MatchKind::Full;

  bool operator==(const Marker&) const = default;
};

// Ordering by (x, y, orientation, pattern id).
bool marker_less(const Marker& a, const Marker& b);
void sort_markers(std::vector<Marker>& markers);

// Full or partial pattern in the form the matcher consumes.
struct MatchPattern {
  std::string id;
  int type_id = 0;
  MatchKind kind = MatchKind::Full;
  Rect extent;
  LayerShapes solids;
  LayerShapes dontcare;

  std::vector<std::string> layers() const;
};

MatchPattern to_match_pattern(const WeakpointPattern& p);
MatchPattern to_match_pattern(const PartialPattern& p);

// Quadrant occupancy around a lattice point: bit 0 = cell above-right,
// bit 1 = above-left, bit 2 = below-left, bit 3 = below-right.
using CornerMask = std::uint8_t;
bool is_corner_mask(CornerMask m);

// Read-only indexed view of a flattened layout. Safe for concurrent queries.
class LayoutIndex {
 public:
  explicit LayoutIndex(FlatLayout layout);

  const Rect& die() const { return die_; }
  bool has_layer(std::string_view layer) const { return layers_.contains(layer); }
  const RectSet& shapes(std::string_view layer) const;

  // Layout rects (canonical pieces) with positive-area overlap with `window`.
  template <typename Fn>
  void visit_overlapping(std::string_view layer, const Rect& window, Fn&& fn) const {
    const auto& data = layers_.find(layer)->second;
    data.index.visit(window, [&](std::size_t, const Rect& r) {
      if (r.overlaps(window)) fn(r);
    });
  }

  // Boundary corners of a layer's union with the given quadrant mask.
  const std::vector<Point>& corners(std::string_view layer, CornerMask mask) const;
  CornerMask mask_at(std::string_view layer, Point p) const;

 private:
  struct LayerData {
    RectSet shapes;
    RectIndex index;
    std::array<std::vector<Point>, 16> corners;
  };
  bool covered(const LayerData& d, Coord x, Coord y) const;

  Rect die_;
  std::map<std::string, LayerData, std::less<>> layers_;
};

// Markers at every translation (window fully inside the die) and orientation
// where, on every pattern layer, the layout inside the window differs from
// the pattern solids only inside the pattern's don't-care region.
// Throws std::invalid_argument when the pattern names a layer the layout lacks.
std::vector<Marker> match_pattern(const LayoutIndex& layout, const MatchPattern& pattern,
                                  std::span<const Orientation> orientations = kAllOrientations);

enum class DeckMode : std::uint8_t { Full, Partial, Both };

struct DeckMatchOptions {
  DeckMode mode = DeckMode::Both;
  PartialMode partial_mode = PartialMode::DontCare;
  std::vector<Orientation> orientations{std::begin(kAllOrientations), std::end(kAllOrientations)};
  TaskPool* pool = nullptr;  // serial when null
};

// Every pattern (and/or its partials) matched; sorted and deduplicated.
// Partials left with no solid geometry are not matched.
std::vector<Marker> match_deck(const LayoutIndex& layout, const PatternDeck& deck, const DeckMatchOptions& options);

// The partial/full pattern list match_deck would run, in task order.
std::vector<MatchPattern> deck_match_patterns(const PatternDeck& deck, DeckMode mode, PartialMode partial_mode);

std::string serialize_markers(const std::vector<Marker>& markers);
std::vector<Marker> parse_markers(std::string_view text, const std::string& source = "<markers>");

}  // namespace lithocheck
