#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lithocheck/geometry.hpp"
#include "lithocheck/layout.hpp"

namespace lithocheck {

// A solid polygon reference: index into the canonical component order of a layer.
struct PolygonRef {
  std::string layer;
  std::size_t index = 0;

  auto operator<=>(const PolygonRef&) const = default;
};

struct WeakpointPattern {
  std::string id;
  int type_id = 1;
  Rect extent;  // anchored at (0, 0)
  LayerShapes solids;
  LayerShapes dontcare;
  std::vector<PolygonRef> removable;

  // Maximal solid polygons of a layer in canonical order.
  std::vector<RectSet> polygons(std::string_view layer) const;
  // Union of layers named by solids or don't-care regions.
  std::vector<std::string> layers() const;

  bool operator==(const WeakpointPattern&) const = default;
};

struct RemovedPolygon {
  std::string layer;
  Rect bbox;

  bool operator==(const RemovedPolygon&) const = default;
};

struct PartialPattern {
  std::string id;  // "<parent>.p<k>"
  std::string parent_id;
  int type_id = 1;
  Rect extent;
  LayerShapes solids;
  LayerShapes dontcare;
  RemovedPolygon removed;

  bool operator==(const PartialPattern&) const = default;
};

struct PatternDeck {
  std::string name;
  std::string process;
  Coord margin = 0;  // don't-care expansion around removed polygons
  std::vector<WeakpointPattern> patterns;

  const WeakpointPattern* find(std::string_view id) const;
  std::vector<int> type_ids() const;  // sorted, unique
  Coord max_extent_dimension() const;

  bool operator==(const PatternDeck&) const = default;
};

PatternDeck parse_deck(std::string_view text, const std::string& source = "<deck>");
std::string serialize_deck(const PatternDeck& deck);

enum class PartialMode : std::uint8_t {
  DontCare,     // removed polygon becomes a don't-care region
  DeletionOnly  // removed polygon is simply dropped
};

// One partial per removable polygon, ordered by (layer, polygon index).
// Throws std::out_of_range when a removable index has no polygon.
std::vector<PartialPattern> generate_partials(const WeakpointPattern& p, Coord margin = 0,
                                              PartialMode mode = PartialMode::DontCare);

std::string serialize_partials(const std::vector<PartialPattern>& partials);

}  // namespace lithocheck
