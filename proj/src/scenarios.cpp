#include "lithocheck/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lithocheck/text_format.hpp"

namespace lithocheck {

std::vector<OrientPair> default_abutment_orientations() {
  using O = Orientation;
  return {{O::N, O::N}, {O::N, O::FN}, {O::FN, O::N}, {O::FN, O::FN}};
}

std::vector<OrientPair> all_abutment_orientations() {
  std::vector<OrientPair> out;
  for (auto a : kAllOrientations)
    for (auto b : kAllOrientations) out.emplace_back(a, b);
  return out;
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(cfg.utilization > 0.0 && cfg.utilization < 1.0)) throw std::invalid_argument("utilization must lie in (0, 1)");
  if (cfg.row_gap < 1) throw std::invalid_argument("row_gap must be at least 1");
  if (cfg.clearance < 0) throw std::invalid_argument("clearance must be non-negative");
  if (cfg.locality < 1) throw std::invalid_argument("locality must be at least 1");
}

std::vector<const Cell*> included_cells(const CellLibrary& lib, const ScenarioConfig& cfg) {
  std::vector<const Cell*> out;
  for (const auto& c : lib.cells)
    if (std::ranges::find(cfg.excluded_classes, c.abut_class) == cfg.excluded_classes.end()) out.push_back(&c);
  return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
  return perm;
}

namespace {

std::string padded(std::size_t v, std::size_t width) {
  std::string s = std::to_string(v);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

std::size_t digits(std::size_t v) { return std::to_string(v).size(); }

bool n_family(Orientation o) { return o == Orientation::N || o == Orientation::FN; }

// Rows alternate N/FS from the die bottom.
void add_rows(Placement& p, const CellLibrary& lib, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    p.rows.push_back({p.die.y_lo + static_cast<Coord>(i) * lib.row_height, i % 2 == 0 ? Orientation::N : Orientation::FS});
}

Coord gap_sites(const CellLibrary& lib, Coord clearance) { return clearance / lib.site_width + 1; }
Coord gap_rows(const CellLibrary& lib, Coord clearance) { return clearance / lib.row_height + 1; }
Coord even_up(Coord v) { return v + (v % 2); }

void require_nonempty(const std::vector<const Cell*>& cells) {
  if (cells.empty()) throw std::invalid_argument("no cells left after class exclusion");
}

}  // namespace

Placement gen_standalone(const CellLibrary& lib, const ScenarioConfig& cfg) {
  validate(cfg);
  auto cells = included_cells(lib, cfg);
  require_nonempty(cells);
  Placement p;
  p.name = "standalone";
  Coord margin_x = gap_sites(lib, cfg.clearance) * lib.site_width;
  Coord margin_rows = even_up(gap_rows(lib, cfg.clearance));
  Coord between = std::max<Coord>(cfg.row_gap, gap_rows(lib, cfg.clearance));
  Coord row = margin_rows;
  Coord max_w = 0;
  for (const Cell* c : cells) {
    p.instances.push_back({c->name, c->name, Orientation::N, margin_x, row * lib.row_height});
    max_w = std::max(max_w, c->width());
    // Next instance starts on an N row.
    row = even_up(row + c->height_rows + between);
  }
  row -= between;
  p.die = {0, 0, 2 * margin_x + max_w, (row + margin_rows) * lib.row_height};
  add_rows(p, lib, static_cast<std::size_t>(row + margin_rows));
  std::ranges::sort(p.instances, {}, &Instance::id);
  return p;
}

namespace {

std::vector<NetlistInstance> netlist_instances(const std::vector<const Cell*>& cells, int n) {
  std::vector<NetlistInstance> out;
  std::size_t width = digits(static_cast<std::size_t>(n - 1));
  for (const Cell* c : cells)
    for (int i = 0; i < n; ++i) out.push_back({c->name + "_" + padded(static_cast<std::size_t>(i), width), c->name});
  std::ranges::sort(out);
  return out;
}

}  // namespace

GeneratedNetlist gen_netlist(const CellLibrary& lib, const ScenarioConfig& cfg) {
  validate(cfg);
  auto cells = included_cells(lib, cfg);
  require_nonempty(cells);
  for (const Cell* c : cells)
    if (std::ranges::none_of(c->pins, [](const Pin& p) { return p.signal_class == SignalClass::Signal; }))
      throw std::invalid_argument("cell '" + c->name + "' has no signal pin");

  GeneratedNetlist nl;
  nl.name = "netlist_s" + std::to_string(cfg.seed);
  nl.instances = netlist_instances(cells, cfg.n);

  // Terminals in placement order so that partners end up physically close.
  struct Term {
    std::size_t inst;
    std::string pin;
  };
  std::vector<Term> terms;
  for (std::size_t k : seeded_permutation(nl.instances.size(), cfg.seed)) {
    const Cell& c = lib.cell(nl.instances[k].cell);
    for (const auto& pin : c.pins)
      if (pin.signal_class == SignalClass::Signal) terms.push_back({k, pin.name});
  }

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<char> taken(terms.size(), 0);
  std::vector<std::vector<std::size_t>> groups;
  std::size_t window = static_cast<std::size_t>(cfg.locality);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (taken[i]) continue;
    taken[i] = 1;
    // Candidates: open terminals on the next `window` distinct other instances.
    std::vector<std::size_t> cands;
    std::set<std::size_t> seen;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (taken[j] || terms[j].inst == terms[i].inst) continue;
      if (!seen.contains(terms[j].inst)) {
        if (seen.size() == window) break;
        seen.insert(terms[j].inst);
      }
      cands.push_back(j);
    }
    if (cands.empty()) {
      for (std::size_t j = i + 1; j < terms.size(); ++j)
        if (!taken[j]) cands.push_back(j);
    }
    if (cands.empty()) {
      if (groups.empty()) throw std::invalid_argument("netlist needs at least two signal pins");
      groups.back().push_back(i);
      continue;
    }
    std::size_t j = cands[rng() % cands.size()];
    taken[j] = 1;
    groups.push_back({i, j});
  }

  std::size_t width = digits(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Net net{"n" + padded(g + 1, std::max<std::size_t>(width, 4)), {}};
    for (std::size_t t : groups[g]) net.terminals.push_back({nl.instances[terms[t].inst].id, terms[t].pin});
    std::ranges::sort(net.terminals);
    nl.nets.push_back(std::move(net));
  }
  std::ranges::sort(nl.nets, {}, &Net::name);
  return nl;
}

std::string serialize_netlist(const GeneratedNetlist& nl) {
  std::ostringstream os;
  os << "NETLIST " << nl.name << '\n';
  for (const auto& i : nl.instances) os << "INST " << i.id << ' ' << i.cell << '\n';
  for (const auto& n : nl.nets) {
    os << "NET " << n.name;
    for (const auto& t : n.terminals) os << ' ' << t.instance << ':' << t.pin;
    os << '\n';
  }
  os << "END NETLIST\n";
  return os.str();
}

GeneratedNetlist parse_netlist(std::string_view text, const CellLibrary& lib, const std::string& source) {
  StatementReader rd(text, source);
  GeneratedNetlist nl;
  const Statement& head = rd.next();
  rd.expect_word(head, 0, "NETLIST");
  rd.expect_size(head, 2);
  nl.name = rd.word(head, 1);
  std::map<std::string, std::string> cell_of;
  for (;;) {
    const Statement& st = rd.next();
    auto kw = st.keyword();
    if (kw == "INST") {
      rd.expect_size(st, 3);
      NetlistInstance inst{rd.word(st, 1), rd.word(st, 2)};
      if (!lib.find_cell(inst.cell)) rd.fail(st, 2, "unknown cell '" + inst.cell + "'");
      if (!cell_of.emplace(inst.id, inst.cell).second) rd.fail(st, 1, "duplicate instance '" + inst.id + "'");
      nl.instances.push_back(std::move(inst));
    } else if (kw == "NET") {
      rd.expect_min_size(st, 4);
      Net net{rd.word(st, 1), {}};
      for (std::size_t k = 2; k < st.size(); ++k) {
        auto tok = st.tokens[k].text;
        auto colon = tok.find(':');
        if (colon == std::string_view::npos) rd.fail(st, k, "terminal must be <instance>:<pin>");
        NetTerminal t{std::string(tok.substr(0, colon)), std::string(tok.substr(colon + 1))};
        auto it = cell_of.find(t.instance);
        if (it == cell_of.end()) rd.fail(st, k, "unknown instance '" + t.instance + "'");
        if (!lib.cell(it->second).find_pin(t.pin)) rd.fail(st, k, "cell " + it->second + " has no pin '" + t.pin + "'");
        net.terminals.push_back(std::move(t));
      }
      std::ranges::sort(net.terminals);
      nl.nets.push_back(std::move(net));
    } else if (kw == "END") {
      rd.expect_size(st, 2);
      rd.expect_word(st, 1, "NETLIST");
      break;
    } else {
      rd.fail(st, 0, "unknown statement '" + std::string(kw) + "'");
    }
  }
  if (!rd.done()) rd.fail(rd.peek(), 0, "content after END NETLIST");
  std::ranges::sort(nl.instances);
  std::ranges::sort(nl.nets, {}, &Net::name);
  return nl;
}

namespace {

struct BandItem {
  std::size_t inst;  // index into the netlist instances
  Coord w;           // sites
  int rows;
  int row = 0;  // band-relative bottom row, set on assignment
};

// Left-to-right layout of a band with a uniform gap; returns x (in sites) per item
// and the widest row end.
std::pair<std::vector<Coord>, Coord> lay_band(const std::vector<BandItem>& items, int band_rows, Coord gap) {
  std::vector<Coord> cursor(static_cast<std::size_t>(band_rows), 0);
  std::vector<Coord> xs;
  Coord end = 0;
  for (const auto& it : items) {
    Coord x = 0;
    for (int r = it.row; r < it.row + it.rows; ++r) x = std::max(x, cursor[static_cast<std::size_t>(r)]);
    if (x > 0) x += gap;
    for (int r = it.row; r < it.row + it.rows; ++r) cursor[static_cast<std::size_t>(r)] = x + it.w;
    xs.push_back(x);
    end = std::max(end, x + it.w);
  }
  return {xs, end};
}

int least_used_row(const std::vector<BandItem>& items, int band_rows, Coord gap, const BandItem& next) {
  std::vector<Coord> cursor(static_cast<std::size_t>(band_rows), 0);
  auto [xs, _] = lay_band(items, band_rows, gap);
  for (std::size_t i = 0; i < items.size(); ++i)
    for (int r = items[i].row; r < items[i].row + items[i].rows; ++r)
      cursor[static_cast<std::size_t>(r)] = std::max(cursor[static_cast<std::size_t>(r)], xs[i] + items[i].w);
  if (next.rows > 1) return 0;
  return static_cast<int>(std::ranges::min_element(cursor) - cursor.begin());
}

}  // namespace

Placement gen_autoplace(const CellLibrary& lib, const GeneratedNetlist& netlist, const ScenarioConfig& cfg) {
  validate(cfg);
  Placement p;
  p.name = "autoplace_s" + std::to_string(cfg.seed);
  if (netlist.instances.empty()) {
    p.die = {0, 0, lib.site_width, lib.row_height};
    add_rows(p, lib, 1);
    return p;
  }
  int band_rows = 2;
  Coord area = 0, max_w = 0;
  std::vector<BandItem> order;
  for (std::size_t k : seeded_permutation(netlist.instances.size(), cfg.seed)) {
    const Cell& c = lib.cell(netlist.instances[k].cell);
    Coord w = c.width() / lib.site_width;
    band_rows = std::max(band_rows, static_cast<int>(even_up(c.height_rows)));
    area += w * c.height_rows;
    max_w = std::max(max_w, w);
    order.push_back({k, w, c.height_rows});
  }

  // Roughly square die at the requested utilization.
  double u = cfg.utilization;
  double a = static_cast<double>(area);
  Coord bands = std::max<Coord>(
      1, std::llround(std::sqrt(a * static_cast<double>(lib.site_width) /
                                (u * band_rows * band_rows * static_cast<double>(lib.row_height)))));
  Coord width = std::max<Coord>(max_w + 2, static_cast<Coord>(std::ceil(a / (u * static_cast<double>(bands * band_rows)))));

  std::vector<std::vector<BandItem>> assigned;
  for (int attempt = 0;; ++attempt) {
    double target = a / static_cast<double>(bands) * (1.0 + 0.01 * attempt);
    assigned.assign(1, {});
    double band_area = 0;
    for (BandItem it : order) {
      double item_area = static_cast<double>(it.w * it.rows);
      auto fits = [&](std::vector<BandItem>& band) {
        it.row = least_used_row(band, band_rows, 1, it);
        band.push_back(it);
        bool ok = lay_band(band, band_rows, 1).second <= width;
        band.pop_back();
        return ok;
      };
      if ((band_area > 0 && band_area + item_area / 2 > target) || !fits(assigned.back())) {
        assigned.emplace_back();
        band_area = 0;
        fits(assigned.back());
      }
      assigned.back().push_back(it);
      band_area += item_area;
    }
    if (static_cast<Coord>(assigned.size()) <= bands) break;
    if (attempt == 40) {
      bands = static_cast<Coord>(assigned.size());
      break;
    }
  }

  p.die = {0, 0, width * lib.site_width, bands * band_rows * lib.row_height};
  add_rows(p, lib, static_cast<std::size_t>(bands * band_rows));
  for (std::size_t b = 0; b < assigned.size(); ++b) {
    const auto& band = assigned[b];
    Coord count = std::max<Coord>(1, static_cast<Coord>(band.size()));
    Coord gap = std::max<Coord>(1, width / count);
    while (gap > 1 && lay_band(band, band_rows, gap).second > width) --gap;
    auto [xs, _] = lay_band(band, band_rows, gap);
    for (std::size_t i = 0; i < band.size(); ++i) {
      const auto& it = band[i];
      Coord row = static_cast<Coord>(b) * band_rows + it.row;
      Orientation o = row % 2 == 0 ? Orientation::N : Orientation::FS;
      if (it.rows % 2 == 0) o = Orientation::N;
      const auto& ni = netlist.instances[it.inst];
      p.instances.push_back({ni.id, ni.cell, o, xs[i] * lib.site_width, row * lib.row_height});
    }
  }
  std::ranges::sort(p.instances, {}, &Instance::id);
  return p;
}

AbuttedScenario gen_abutted(const CellLibrary& lib, const ScenarioConfig& cfg) {
  validate(cfg);
  auto cells = included_cells(lib, cfg);
  require_nonempty(cells);
  AbuttedScenario out;
  struct Candidate {
    const Cell* a;
    Orientation oa;
    const Cell* b;
    Orientation ob;
    bool fs_bottom;
  };
  std::vector<Candidate> placed;
  for (const Cell* a : cells) {
    for (const Cell* b : cells) {
      for (auto [oa, ob] : cfg.abutment_orientations) {
        if (const AbutConstraint* f = lib.forbidden(*a, *b)) {
          out.omitted.push_back({a->name, oa, b->name, ob, f->describe()});
          continue;
        }
        // Odd-height cells fix the parity of their bottom row.
        std::optional<bool> n_row;
        bool clash = false;
        for (auto [c, o] : {std::pair{a, oa}, std::pair{b, ob}}) {
          if (c->height_rows % 2 == 0) continue;
          if (n_row && *n_row != n_family(o)) clash = true;
          n_row = n_family(o);
        }
        if (clash) {
          out.omitted.push_back({a->name, oa, b->name, ob, "ROW_PARITY"});
          continue;
        }
        placed.push_back({a, oa, b, ob, n_row.has_value() && !*n_row});
      }
    }
  }

  Coord site = lib.site_width;
  Coord hgap = gap_sites(lib, cfg.clearance) * site;
  Coord vgap_rows = std::max<Coord>(cfg.row_gap, gap_rows(lib, cfg.clearance));
  Coord margin_rows = even_up(gap_rows(lib, cfg.clearance));
  int max_rows = 1;
  Coord total_w = 0;
  for (const Cell* c : cells) max_rows = std::max(max_rows, c->height_rows);
  for (const auto& c : placed) total_w += c.a->width() + c.b->width() + hgap;
  Coord per_line = static_cast<Coord>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(placed.size(), 1)))));
  Coord line_limit = placed.empty() ? 0 : total_w / static_cast<Coord>(placed.size()) * per_line;
  Coord band_pitch = even_up(max_rows + 1 + vgap_rows);

  std::size_t digits_slot = digits(placed.size());
  Coord x = hgap, band = 0, max_x = hgap;
  for (std::size_t s = 0; s < placed.size(); ++s) {
    const auto& c = placed[s];
    Coord pair_w = c.a->width() + c.b->width();
    if (x > hgap && x + pair_w > hgap + line_limit) {
      x = hgap;
      ++band;
    }
    Coord row = margin_rows + band * band_pitch + (c.fs_bottom ? 1 : 0);
    Coord y = row * lib.row_height;
    PairRecord rec;
    rec.slot = static_cast<int>(s);
    rec.left_cell = c.a->name;
    rec.left_orient = c.oa;
    rec.right_cell = c.b->name;
    rec.right_orient = c.ob;
    rec.left_instance = "p" + padded(s, digits_slot) + "_l";
    rec.right_instance = "p" + padded(s, digits_slot) + "_r";
    rec.junction_x = x + c.a->width();
    rec.region = {x, y, x + pair_w, y + std::max(c.a->height(), c.b->height())};
    out.placement.instances.push_back({rec.left_instance, c.a->name, c.oa, x, y});
    out.placement.instances.push_back({rec.right_instance, c.b->name, c.ob, rec.junction_x, y});
    out.pairs.push_back(std::move(rec));
    x += pair_w + hgap;
    max_x = std::max(max_x, x);
  }
  Coord rows = margin_rows + (band + 1) * band_pitch - vgap_rows + margin_rows;
  rows = even_up(rows);
  out.placement.name = "abutted";
  out.placement.die = {0, 0, std::max(max_x, hgap + site), rows * lib.row_height};
  add_rows(out.placement, lib, static_cast<std::size_t>(rows));
  std::ranges::sort(out.placement.instances, {}, &Instance::id);
  std::ranges::sort(out.omitted, [](const Omission& l, const Omission& r) {
    return std::tie(l.left_cell, l.left_orient, l.right_cell, l.right_orient) <
           std::tie(r.left_cell, r.left_orient, r.right_cell, r.right_orient);
  });
  return out;
}

std::string serialize_omissions(const std::vector<Omission>& omitted) {
  std::vector<std::string> lines;
  for (const auto& o : omitted)
    lines.push_back("OMIT " + o.left_cell + ' ' + std::string(to_string(o.left_orient)) + ' ' + o.right_cell + ' ' +
                    std::string(to_string(o.right_orient)) + ' ' + o.constraint + '\n');
  std::ranges::sort(lines);
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

}  // namespace lithocheck
