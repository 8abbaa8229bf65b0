#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lithocheck/geometry.hpp"

namespace lithocheck {

enum class LayerKind : std::uint8_t { Metal, Via };
enum class RoutingDirection : std::uint8_t { Horizontal, Vertical, None };

struct Layer {
  std::string name;
  LayerKind kind = LayerKind::Metal;
  RoutingDirection direction = RoutingDirection::None;

  bool operator==(const Layer&) const = default;
};

// Shapes keyed by layer name; every RectSet is canonical and non-empty.
using LayerShapes = std::map<std::string, RectSet>;

enum class SignalClass : std::uint8_t { Signal, Power, Ground };

struct Pin {
  std::string name;
  SignalClass signal_class = SignalClass::Signal;
  LayerShapes shapes;

  bool operator==(const Pin&) const = default;
};

struct Cell {
  std::string name;
  Rect pr_boundary;  // anchored at (0, 0)
  int height_rows = 1;
  LayerShapes shapes;  // non-pin geometry, rails included
  std::vector<Pin> pins;  // sorted by name
  LayerShapes obstructions;
  std::string abut_class;

  Coord width() const { return pr_boundary.width(); }
  Coord height() const { return pr_boundary.height(); }
  const Pin* find_pin(std::string_view name) const;

  bool operator==(const Cell&) const = default;
};

enum class AbutSide : std::uint8_t { Left, Right, Either };

// `class_b` may not touch the given side of `class_a`.
struct AbutConstraint {
  std::string class_a;
  std::string class_b;
  AbutSide side = AbutSide::Either;

  bool forbids(std::string_view left_class, std::string_view right_class) const;
  std::string describe() const;

  bool operator==(const AbutConstraint&) const = default;
};

struct CellLibrary {
  std::string name;
  Coord row_height = 0;
  Coord site_width = 0;
  std::vector<Layer> layers;  // process stack order, bottom first
  std::vector<Cell> cells;    // sorted by name
  std::vector<AbutConstraint> forbidden_abutments;

  const Cell* find_cell(std::string_view name) const;
  const Cell& cell(std::string_view name) const;  // throws on unknown cell
  const Layer* find_layer(std::string_view name) const;
  int layer_index(std::string_view name) const;  // -1 when unknown
  // The via layer stacked between two metal layers, if any.
  std::optional<std::string> cut_layer_between(std::string_view lower, std::string_view upper) const;
  // First constraint forbidding `left` abutted on the left of `right`.
  const AbutConstraint* forbidden(const Cell& left, const Cell& right) const;

  bool operator==(const CellLibrary&) const = default;
};

struct Instance {
  std::string id;
  std::string cell;
  Orientation orient = Orientation::N;
  Coord x = 0;  // lower-left corner of the placed footprint
  Coord y = 0;

  bool operator==(const Instance&) const = default;
};

struct Row {
  Coord y = 0;
  Orientation orient = Orientation::N;  // N or FS

  bool operator==(const Row&) const = default;
};

struct Placement {
  std::string name;
  Rect die;
  std::vector<Row> rows;            // sorted by y
  std::vector<Instance> instances;  // sorted by id

  const Instance* find_instance(std::string_view id) const;

  bool operator==(const Placement&) const = default;
};

struct NetTerminal {
  std::string instance;
  std::string pin;

  auto operator<=>(const NetTerminal&) const = default;
};

struct Net {
  std::string name;
  std::vector<NetTerminal> terminals;

  bool operator==(const Net&) const = default;
};

struct Via {
  std::string lower;
  std::string upper;
  std::string cut_layer;
  Rect cut;
  Rect lower_enclosure;
  Rect upper_enclosure;

  auto operator<=>(const Via&) const = default;
};

struct NetRouting {
  LayerShapes wires;
  std::vector<Via> vias;  // sorted

  bool operator==(const NetRouting&) const = default;
};

struct RoutedDesign {
  std::string design_id;
  Placement placement;
  std::vector<Net> nets;                    // sorted by name
  std::map<std::string, NetRouting> routing;  // by net name; unrouted nets absent

  bool operator==(const RoutedDesign&) const = default;
};

CellLibrary parse_library(std::string_view text, const std::string& source = "<library>");
std::string serialize_library(const CellLibrary& lib);

Placement parse_placement(std::string_view text, const CellLibrary& lib, const std::string& source = "<placement>");
std::string serialize_placement(const Placement& p);

RoutedDesign parse_routed_design(std::string_view text, const CellLibrary& lib,
                                 const std::string& source = "<design>");
std::string serialize_routed_design(const RoutedDesign& d);

Transform instance_transform(const Instance& inst, const CellLibrary& lib);
Rect instance_footprint(const Instance& inst, const CellLibrary& lib);

// Empty result means the placement is legal.
std::vector<std::string> check_placement_legality(const Placement& p, const CellLibrary& lib);

// Merged layout view of one layer: instance shapes and pins (not obstructions),
// routed wires, via enclosures on metal layers and via cuts on cut layers.
RectSet flatten(const Placement& p, const CellLibrary& lib, std::string_view layer, const Rect& window);
RectSet flatten(const RoutedDesign& d, const CellLibrary& lib, std::string_view layer, const Rect& window);

// Every layer flattened over the whole die.
struct FlatLayout {
  Rect die;
  std::map<std::string, RectSet, std::less<>> layers;
};
FlatLayout flatten_all(const Placement& p, const CellLibrary& lib);
FlatLayout flatten_all(const RoutedDesign& d, const CellLibrary& lib);

// Reads a rectilinear polygon given as a closed vertex loop into a rect union.
// Throws std::invalid_argument for non-rectilinear or malformed loops.
RectSet rectilinear_polygon(const std::vector<Point>& vertices);

}  // namespace lithocheck
