#include "lithocheck/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lithocheck/spatial_index.hpp"
#include "lithocheck/text_format.hpp"

namespace lithocheck {

namespace {

using Wide = __int128;

Wide floor_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Percent::Percent(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("percent with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  num_ = num / g;
  den_ = den / g;
}

Percent Percent::of(std::int64_t part, std::int64_t whole) { return Percent(100 * part, whole); }

std::int64_t round_half_up(std::int64_t num, std::int64_t den, std::int64_t scale) {
  Wide n = static_cast<Wide>(num) * scale * 2 + den;
  return static_cast<std::int64_t>(floor_div(n, static_cast<Wide>(den) * 2));
}

std::int64_t Percent::milli() const { return round_half_up(num_, den_, 1000); }

std::string Percent::display() const {
  std::int64_t tenths = round_half_up(num_, den_, 10);
  std::string sign = tenths < 0 ? "-" : "";
  std::int64_t a = tenths < 0 ? -tenths : tenths;
  return sign + std::to_string(a / 10) + "." + std::to_string(a % 10);
}

Percent operator+(const Percent& a, const Percent& b) {
  return Percent(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Percent operator-(const Percent& a, const Percent& b) {
  return Percent(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

std::strong_ordering operator<=>(const Percent& a, const Percent& b) {
  Wide l = static_cast<Wide>(a.num_) * b.den_, r = static_cast<Wide>(b.num_) * a.den_;
  return l < r ? std::strong_ordering::less : l > r ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::vector<LfrRecord> compute_lfr(const Placement& placement, const std::vector<Marker>& markers,
                                   const CellLibrary& lib, const PatternDeck& deck, const std::string& design) {
  std::set<int> types;
  for (const auto& p : deck.patterns) types.insert(p.type_id);
  std::map<int, RectIndex> by_type;
  Rect domain = placement.die;
  for (const auto& m : markers) {
    if (!types.contains(m.type_id))
      throw std::invalid_argument("marker of pattern '" + m.pattern_id + "' has type " + std::to_string(m.type_id) +
                                  " which the deck does not define");
    domain = domain.hull(m.rect);
  }
  Coord bin = std::max<Coord>(64, std::max(domain.width(), domain.height()) / 256);
  for (int t : types) by_type[t].reset(domain, bin);
  for (const auto& m : markers) by_type[m.type_id].insert(m.rect);

  std::map<std::pair<std::string, int>, std::pair<std::int64_t, std::int64_t>> counts;  // hit, total
  for (const auto& inst : placement.instances) {
    Rect fp = instance_footprint(inst, lib);
    for (int t : types) {
      auto& c = counts[{inst.cell, t}];
      ++c.second;
      bool hit = false;
      by_type[t].visit(fp, [&](std::size_t, const Rect& r) { hit = hit || r.overlaps(fp); });
      c.first += hit;
    }
  }
  std::vector<LfrRecord> out;
  for (const auto& [key, c] : counts) {
    LfrRecord r;
    r.cell = key.first;
    r.type_id = key.second;
    r.design = design;
    r.instance_hit = c.first;
    r.instance_total = c.second;
    r.pl_prime = Percent::of(c.first, c.second);
    r.lfr_prime = Percent(100, 1) - r.pl_prime;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CellRank> rank_cells(const std::vector<LfrRecord>& records, Percent threshold) {
  std::map<std::string, CellRank> per_cell;
  for (const auto& r : records) {
    auto [it, fresh] = per_cell.try_emplace(r.cell, CellRank{r.cell, r.lfr_prime, r.type_id, false});
    CellRank& c = it->second;
    if (!fresh && (r.lfr_prime < c.min_lfr || (r.lfr_prime == c.min_lfr && r.type_id < c.worst_type))) {
      c.min_lfr = r.lfr_prime;
      c.worst_type = r.type_id;
    }
  }
  std::vector<CellRank> out;
  for (auto& [_, c] : per_cell) {
    c.problematic = c.min_lfr <= threshold;
    out.push_back(std::move(c));
  }
  std::ranges::stable_sort(out, [](const CellRank& a, const CellRank& b) {
    if (a.min_lfr != b.min_lfr) return a.min_lfr < b.min_lfr;
    return a.cell < b.cell;
  });
  return out;
}

DesignMetrics summarize(const std::string& design, const PatternDeck& deck, const std::vector<Marker>& markers,
                        std::vector<LfrRecord> records) {
  DesignMetrics m;
  m.design = design;
  m.deck = deck.name;
  std::set<int> types;
  for (const auto& p : deck.patterns) types.insert(p.type_id);
  m.types.assign(types.begin(), types.end());
  for (int t : m.types) m.marker_counts[t] = 0;
  for (const auto& mk : markers) ++m.marker_counts[mk.type_id];
  m.records = std::move(records);
  return m;
}

DesignComparison compare_designs(const DesignMetrics& before, const DesignMetrics& after) {
  if (before.deck != after.deck || before.types != after.types)
    throw std::invalid_argument("designs '" + before.design + "' and '" + after.design +
                                "' were checked against different decks");
  DesignComparison c;
  for (int t : before.types) {
    TypeDelta d{t, before.marker_counts.at(t), after.marker_counts.at(t)};
    c.total_before += d.before;
    c.total_after += d.after;
    c.types.push_back(d);
  }
  auto mins = [](const DesignMetrics& m) {
    std::map<std::string, Percent> out;
    for (const auto& r : rank_cells(m.records)) out.emplace(r.cell, r.min_lfr);
    return out;
  };
  auto b = mins(before), a = mins(after);
  for (const auto& [cell, v] : b)
    if (auto it = a.find(cell); it != a.end()) c.cells.push_back({cell, v, it->second});
  return c;
}

std::string serialize_lfr(const std::vector<LfrRecord>& records) {
  std::ostringstream os;
  for (const auto& r : records)
    os << "LFR " << r.cell << ' ' << r.type_id << ' ' << r.design << ' ' << r.instance_hit << ' ' << r.instance_total
       << ' ' << r.pl_prime.milli() << ' ' << r.lfr_prime.milli() << '\n';
  return os.str();
}

std::vector<LfrRecord> parse_lfr(std::string_view text, const std::string& source) {
  StatementReader rd(text, source);
  std::vector<LfrRecord> out;
  while (!rd.done()) {
    const Statement& st = rd.next();
    rd.expect_word(st, 0, "LFR");
    rd.expect_size(st, 8);
    LfrRecord r;
    r.cell = rd.word(st, 1);
    r.type_id = static_cast<int>(rd.positive(st, 2));
    r.design = rd.word(st, 3);
    r.instance_hit = rd.integer(st, 4);
    r.instance_total = rd.positive(st, 5);
    if (r.instance_hit < 0 || r.instance_hit > r.instance_total) rd.fail(st, 4, "hit count out of range");
    r.pl_prime = Percent::of(r.instance_hit, r.instance_total);
    r.lfr_prime = Percent(100, 1) - r.pl_prime;
    if (rd.integer(st, 6) != r.pl_prime.milli()) rd.fail(st, 6, "pl value does not match hit/total");
    if (rd.integer(st, 7) != r.lfr_prime.milli()) rd.fail(st, 7, "lfr value does not match hit/total");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lithocheck
