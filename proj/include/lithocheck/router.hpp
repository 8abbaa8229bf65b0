#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lithocheck/geometry.hpp"
#include "lithocheck/layout.hpp"

namespace lithocheck {

struct TrackDef {
  std::string layer;
  Coord pitch = 0;
  Coord offset = 0;
  RoutingDirection direction = RoutingDirection::Horizontal;
  Coord width = 0;

  bool operator==(const TrackDef&) const = default;
};

struct ViaDef {
  std::string lower;
  std::string upper;
  Coord cut_w = 0;
  Coord cut_h = 0;
  Coord lower_enclosure = 0;
  Coord upper_enclosure = 0;

  bool operator==(const ViaDef&) const = default;
};

struct RouterTech {
  std::vector<TrackDef> tracks;  // routing layers, bottom first
  std::vector<ViaDef> vias;
  Coord spacing = -1;  // defaults to the widest track width
  int via_penalty = 3;
  double max_skip_fraction = 0.05;

  const ViaDef* via_between(std::string_view lower, std::string_view upper) const;
  Coord effective_spacing() const;

  bool operator==(const RouterTech&) const = default;
};

// TRACKS / VIA lines plus optional SPACING, VIA_PENALTY and MAX_SKIP.
// Layers are checked against the library stack.
RouterTech parse_tech(std::string_view text, const CellLibrary& lib, const std::string& source = "<tech>");
std::string serialize_tech(const RouterTech& tech);

// Track lattice over the die and the per-layer obstacles from the placement.
class RoutingGrid {
 public:
  RoutingGrid(const CellLibrary& lib, const Placement& placement, const RouterTech& tech);

  const std::vector<Coord>& xs() const { return xs_; }
  const std::vector<Coord>& ys() const { return ys_; }
  std::size_t layer_count() const { return tech_.tracks.size(); }
  const TrackDef& layer(std::size_t l) const { return tech_.tracks[l]; }
  const RouterTech& tech() const { return tech_; }

  // Blocked by cell shapes, obstructions and pins for a net that owns none of them.
  bool node_blocked(std::size_t layer, std::size_t xi, std::size_t yi) const;
  std::size_t blocked_count() const;

  // Every static obstacle (cell shapes, obstructions, all pins) on a layer.
  const std::vector<Rect>& obstacles(std::string_view layer) const;

 private:
  RouterTech tech_;
  std::vector<Coord> xs_, ys_;
  std::map<std::string, std::vector<Rect>, std::less<>> obstacles_;
};

struct SkippedNet {
  std::string net;
  std::string reason;

  bool operator==(const SkippedNet&) const = default;
};

struct RouteResult {
  RoutedDesign design;
  std::vector<SkippedNet> skipped;  // sorted by net
  std::size_t net_count = 0;

  double skip_fraction() const;
};

class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sequential maze routing in (HPWL, name) order. Throws RoutingError when
// the skipped share exceeds the tech limit (the result is not returned).
RouteResult route(const CellLibrary& lib, const Placement& placement, const std::vector<Net>& nets,
                  const RouterTech& tech, const std::string& design_id);

// Same as route() but never throws on the skip limit.
RouteResult route_unchecked(const CellLibrary& lib, const Placement& placement, const std::vector<Net>& nets,
                            const RouterTech& tech, const std::string& design_id);

// Checks on a finished design; each returns human-readable issues, empty when sound.
std::vector<std::string> check_connectivity(const RoutedDesign& d, const CellLibrary& lib);
std::vector<std::string> check_shorts(const RoutedDesign& d, const CellLibrary& lib);

}  // namespace lithocheck
