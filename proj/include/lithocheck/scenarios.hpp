#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lithocheck/layout.hpp"

namespace lithocheck {

using OrientPair = std::pair<Orientation, Orientation>;

std::vector<OrientPair> default_abutment_orientations();
std::vector<OrientPair> all_abutment_orientations();

struct ScenarioConfig {
  int n = 800;  // instances per cell in the netlist
  double utilization = 0.7;
  std::uint64_t seed = 1;
  std::vector<std::string> excluded_classes{"filler"};
  std::vector<OrientPair> abutment_orientations = default_abutment_orientations();
  int row_gap = 1;
  // Free space kept around generated instances and between abutted pairs,
  // normally the largest pattern extent dimension.
  Coord clearance = 0;
  // Net partners are drawn from this many following instances in placement order.
  int locality = 3;
};

// Throws std::invalid_argument when a field is out of range.
void validate(const ScenarioConfig& cfg);

std::vector<const Cell*> included_cells(const CellLibrary& lib, const ScenarioConfig& cfg);

// Portable seeded permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct NetlistInstance {
  std::string id;
  std::string cell;

  auto operator<=>(const NetlistInstance&) const = default;
};

struct GeneratedNetlist {
  std::string name;
  std::vector<NetlistInstance> instances;  // sorted by id
  std::vector<Net> nets;                   // sorted by name

  bool operator==(const GeneratedNetlist&) const = default;
};

std::string serialize_netlist(const GeneratedNetlist& nl);
GeneratedNetlist parse_netlist(std::string_view text, const CellLibrary& lib, const std::string& source = "<netlist>");

Placement gen_standalone(const CellLibrary& lib, const ScenarioConfig& cfg);
GeneratedNetlist gen_netlist(const CellLibrary& lib, const ScenarioConfig& cfg);
Placement gen_autoplace(const CellLibrary& lib, const GeneratedNetlist& netlist, const ScenarioConfig& cfg);

struct PairRecord {
  int slot = 0;
  std::string left_cell;
  Orientation left_orient = Orientation::N;
  std::string right_cell;
  Orientation right_orient = Orientation::N;
  std::string left_instance;
  std::string right_instance;
  Rect region;  // union of both footprints
  Coord junction_x = 0;

  bool operator==(const PairRecord&) const = default;
};

struct Omission {
  std::string left_cell;
  Orientation left_orient = Orientation::N;
  std::string right_cell;
  Orientation right_orient = Orientation::N;
  std::string constraint;

  bool operator==(const Omission&) const = default;
};

struct AbuttedScenario {
  Placement placement;
  std::vector<PairRecord> pairs;
  std::vector<Omission> omitted;
};

AbuttedScenario gen_abutted(const CellLibrary& lib, const ScenarioConfig& cfg);

std::string serialize_omissions(const std::vector<Omission>& omitted);

}  // namespace lithocheck
