#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lithocheck/layout.hpp"
#include "lithocheck/matcher.hpp"
#include "lithocheck/pattern.hpp"

namespace lithocheck {

// Exact percentage num/den, kept reduced with den > 0.
class Percent {
 public:
  Percent() = default;
  Percent(std::int64_t num, std::int64_t den);
  static Percent of(std::int64_t part, std::int64_t whole);  // 100 * part / whole

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  // Thousandths of a percent, rounded half up.
  std::int64_t milli() const;
  // One decimal, rounded half up, e.g. "52.7".
  std::string display() const;
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Percent operator+(const Percent& a, const Percent& b);
  friend Percent operator-(const Percent& a, const Percent& b);
  friend bool operator==(const Percent& a, const Percent& b) = default;
  friend std::strong_ordering operator<=>(const Percent& a, const Percent& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Rounds num/den * scale half up (num may be negative).
std::int64_t round_half_up(std::int64_t num, std::int64_t den, std::int64_t scale);

struct LfrRecord {
  std::string cell;
  int type_id = 0;
  std::string design;
  std::int64_t instance_total = 0;
  std::int64_t instance_hit = 0;
  Percent pl_prime;
  Percent lfr_prime;

  bool operator==(const LfrRecord&) const = default;
};

// One record per (cell, deck type) for every cell with instances, sorted by
// (cell, type). An instance is hit when its footprint overlaps a marker of
// that type with positive area. Throws std::invalid_argument on a marker
// whose type the deck does not define.
std::vector<LfrRecord> compute_lfr(const Placement& placement, const std::vector<Marker>& markers,
                                   const CellLibrary& lib, const PatternDeck& deck, const std::string& design);

struct CellRank {
  std::string cell;
  Percent min_lfr;
  int worst_type = 0;  // lowest type id reaching the minimum
  bool problematic = false;

  bool operator==(const CellRank&) const = default;
};

constexpr std::int64_t kDefaultThreshold = 85;

// Ascending by minimum LFR' then name; at or below threshold is problematic.
std::vector<CellRank> rank_cells(const std::vector<LfrRecord>& records, Percent threshold = Percent(kDefaultThreshold, 1));

struct DesignMetrics {
  std::string design;
  std::string deck;
  std::vector<int> types;                  // every deck type id, ascending
  std::map<int, std::int64_t> marker_counts;  // per type
  std::vector<LfrRecord> records;
};

DesignMetrics summarize(const std::string& design, const PatternDeck& deck, const std::vector<Marker>& markers,
                        std::vector<LfrRecord> records);

struct TypeDelta {
  int type_id = 0;
  std::int64_t before = 0;
  std::int64_t after = 0;
  std::int64_t delta() const { return after - before; }
};

struct CellDelta {
  std::string cell;
  Percent before;  // minimum LFR'
  Percent after;
  Percent delta() const { return after - before; }
};

struct DesignComparison {
  std::vector<TypeDelta> types;
  std::int64_t total_before = 0;
  std::int64_t total_after = 0;
  std::vector<CellDelta> cells;  // cells present in both, by name
};

// Throws std::invalid_argument when the two runs used different decks.
DesignComparison compare_designs(const DesignMetrics& before, const DesignMetrics& after);

std::string serialize_lfr(const std::vector<LfrRecord>& records);
std::vector<LfrRecord> parse_lfr(std::string_view text, const std::string& source = "<lfr>");

}  // namespace lithocheck
