#include "lithocheck/layout.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lithocheck/spatial_index.hpp"
#include "lithocheck/text_format.hpp"

namespace lithocheck {

const Pin* Cell::find_pin(std::string_view name) const {
  for (const auto& p : pins)
    if (p.name == name) return &p;
  return nullptr;
}

bool AbutConstraint::forbids(std::string_view left_class, std::string_view right_class) const {
  bool b_right_of_a = left_class == class_a && right_class == class_b;
  bool b_left_of_a = left_class == class_b && right_class == class_a;
  switch (side) {
    case AbutSide::Right: return b_right_of_a;
    case AbutSide::Left: return b_left_of_a;
    case AbutSide::Either: return b_right_of_a || b_left_of_a;
  }
  return false;
}

static std::string_view side_name(AbutSide s) {
  switch (s) {
    case AbutSide::Left: return "left";
    case AbutSide::Right: return "right";
    case AbutSide::Either: return "either";
  }
  return "?";
}

std::string AbutConstraint::describe() const {
  return "FORBID_ABUT:" + class_a + ":" + class_b + ":" + std::string(side_name(side));
}

const Cell* CellLibrary::find_cell(std::string_view name) const {
  auto it = std::ranges::lower_bound(cells, name, {}, [](const Cell& c) -> std::string_view { return c.name; });
  if (it != cells.end() && it->name == name) return &*it;
  return nullptr;
}

const Cell& CellLibrary::cell(std::string_view name) const {
  const Cell* c = find_cell(name);
  if (!c) throw std::invalid_argument("unknown cell '" + std::string(name) + "'");
  return *c;
}

const Layer* CellLibrary::find_layer(std::string_view name) const {
  for (const auto& l : layers)
    if (l.name == name) return &l;
  return nullptr;
}

int CellLibrary::layer_index(std::string_view name) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].name == name) return static_cast<int>(i);
  return -1;
}

std::optional<std::string> CellLibrary::cut_layer_between(std::string_view lower, std::string_view upper) const {
  int lo = layer_index(lower), hi = layer_index(upper);
  if (lo < 0 || hi < 0 || lo >= hi) return std::nullopt;
  for (int i = lo + 1; i < hi; ++i)
    if (layers[static_cast<std::size_t>(i)].kind == LayerKind::Via) return layers[static_cast<std::size_t>(i)].name;
  return std::nullopt;
}

const AbutConstraint* CellLibrary::forbidden(const Cell& left, const Cell& right) const {
  for (const auto& c : forbidden_abutments)
    if (c.forbids(left.abut_class, right.abut_class)) return &c;
  return nullptr;
}

const Instance* Placement::find_instance(std::string_view id) const {
  auto it = std::ranges::lower_bound(instances, id, {}, [](const Instance& i) -> std::string_view { return i.id; });
  if (it != instances.end() && it->id == id) return &*it;
  return nullptr;
}

RectSet rectilinear_polygon(const std::vector<Point>& v) {
  if (v.size() < 4) throw std::invalid_argument("polygon needs at least 4 vertices");
  struct VEdge {
    Coord x, y0, y1;
  };
  std::vector<VEdge> edges;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point a = v[i], b = v[(i + 1) % v.size()];
    if (a == b) throw std::invalid_argument("polygon has a zero-length edge");
    if (a.x != b.x && a.y != b.y) throw std::invalid_argument("non-rectilinear polygon edge");
    if (a.x == b.x) edges.push_back({a.x, std::min(a.y, b.y), std::max(a.y, b.y)});
  }
  std::vector<Coord> ys;
  for (const auto& e : edges) ys.insert(ys.end(), {e.y0, e.y1});
  std::ranges::sort(ys);
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<Rect> rects;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    std::vector<Coord> xs;
    for (const auto& e : edges)
      if (e.y0 <= ys[k] && ys[k + 1] <= e.y1) xs.push_back(e.x);
    std::ranges::sort(xs);
    if (xs.size() % 2 != 0) throw std::invalid_argument("polygon boundary is not closed");
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
      if (xs[i] < xs[i + 1]) rects.push_back({xs[i], ys[k], xs[i + 1], ys[k + 1]});
  }
  return RectSet::canonical_of(std::move(rects));
}

namespace {

using RawShapes = std::map<std::string, std::vector<Rect>>;

LayerShapes finish_shapes(RawShapes raw) {
  LayerShapes out;
  for (auto& [layer, rects] : raw)
    if (!rects.empty()) out.emplace(layer, RectSet::canonical_of(std::move(rects)));
  return out;
}

std::string known_layer(const StatementReader& rd, const Statement& st, std::size_t tok, const CellLibrary& lib) {
  std::string name = rd.word(st, tok);
  if (!lib.find_layer(name)) rd.fail(st, tok, "unknown layer '" + name + "'");
  return name;
}

// RECT <layer> x1 y1 x2 y2  |  POLYGON <layer> x1 y1 x2 y2 ...
void read_shape(const StatementReader& rd, const Statement& st, const CellLibrary& lib, RawShapes& dst) {
  std::string layer = known_layer(rd, st, 1, lib);
  if (st.keyword() == "RECT") {
    rd.expect_size(st, 6);
    dst[layer].push_back(rd.rect(st, 2));
    return;
  }
  if (st.size() < 10 || (st.size() - 2) % 2 != 0) rd.fail(st, st.size(), "POLYGON needs at least 4 x/y pairs");
  std::vector<Point> pts;
  for (std::size_t i = 2; i + 1 < st.size(); i += 2) pts.push_back({rd.integer(st, i), rd.integer(st, i + 1)});
  try {
    auto poly = rectilinear_polygon(pts);
    for (const auto& r : poly.rects()) dst[layer].push_back(r);
  } catch (const std::invalid_argument& e) {
    rd.fail(st, 2, e.what());
  }
}

Cell read_cell(StatementReader& rd, const Statement& head, const CellLibrary& lib) {
  rd.expect_size(head, 8);
  rd.expect_word(head, 2, "HEIGHT");
  rd.expect_word(head, 4, "WIDTH");
  rd.expect_word(head, 6, "CLASS");
  Cell cell;
  cell.name = rd.word(head, 1);
  cell.height_rows = static_cast<int>(rd.positive(head, 3));
  Coord width = rd.positive(head, 5);
  cell.abut_class = rd.word(head, 7);
  cell.pr_boundary = {0, 0, width, cell.height_rows * lib.row_height};

  RawShapes shapes, obs;
  std::vector<std::pair<Pin, RawShapes>> pins;
  for (;;) {
    const Statement& st = rd.next();
    auto kw = st.keyword();
    if (kw == "RECT" || kw == "POLYGON") {
      rd.expect_min_size(st, 2);
      read_shape(rd, st, lib, pins.empty() ? shapes : pins.back().second);
    } else if (kw == "PIN") {
      rd.expect_size(st, 3);
      Pin pin;
      pin.name = rd.word(st, 1);
      auto cls = st.tokens[2].text;
      if (cls == "signal") pin.signal_class = SignalClass::Signal;
      else if (cls == "power") pin.signal_class = SignalClass::Power;
      else if (cls == "ground") pin.signal_class = SignalClass::Ground;
      else rd.fail(st, 2, "pin class must be signal, power or ground");
      for (const auto& [p, _] : pins)
        if (p.name == pin.name) rd.fail(st, 1, "duplicate pin '" + pin.name + "'");
      pins.emplace_back(std::move(pin), RawShapes{});
    } else if (kw == "OBS") {
      rd.expect_size(st, 6);
      obs[known_layer(rd, st, 1, lib)].push_back(rd.rect(st, 2));
    } else if (kw == "END") {
      rd.expect_size(st, 2);
      rd.expect_word(st, 1, "CELL");
      break;
    } else {
      rd.fail(st, 0, "unexpected '" + std::string(kw) + "' inside CELL");
    }
  }
  cell.shapes = finish_shapes(std::move(shapes));
  cell.obstructions = finish_shapes(std::move(obs));
  for (auto& [pin, raw] : pins) {
    pin.shapes = finish_shapes(std::move(raw));
    cell.pins.push_back(std::move(pin));
  }
  std::ranges::sort(cell.pins, {}, &Pin::name);
  return cell;
}

void validate_library(const CellLibrary& lib) {
  if (lib.cells.empty()) throw ValidationError("library must contain at least one cell");
  std::set<std::string> classes;
  for (std::size_t i = 0; i < lib.cells.size(); ++i) {
    const Cell& c = lib.cells[i];
    auto bad = [&](const std::string& why) { throw ValidationError("cell '" + c.name + "': " + why); };
    if (i > 0 && lib.cells[i - 1].name == c.name) bad("duplicate cell name");
    if (c.height() != c.height_rows * lib.row_height) bad("PR boundary height is not HEIGHT x ROWHEIGHT");
    if (c.width() % lib.site_width != 0) bad("width is not a multiple of SITEWIDTH");
    for (const auto& p : c.pins) {
      if (p.shapes.empty()) bad("pin '" + p.name + "' has no shapes");
      for (const auto& [layer, s] : p.shapes)
        if (!c.pr_boundary.contains(*s.bbox())) bad("pin '" + p.name + "' extends outside the PR boundary");
    }
    classes.insert(c.abut_class);
  }
  for (const auto& f : lib.forbidden_abutments)
    for (const auto& cls : {f.class_a, f.class_b})
      if (!classes.contains(cls)) throw ValidationError("FORBID_ABUT references unknown class '" + cls + "'");
}

void write_shapes(std::ostream& os, std::string_view indent, std::string_view kw, const LayerShapes& shapes) {
  for (const auto& [layer, s] : shapes)
    for (const auto& r : s.rects()) os << indent << kw << ' ' << layer << ' ' << format_rect(r) << '\n';
}

}  // namespace

CellLibrary parse_library(std::string_view text, const std::string& source) {
  StatementReader rd(text, source);
  CellLibrary lib;
  {
    const Statement& st = rd.next();
    rd.expect_word(st, 0, "LIBRARY");
    rd.expect_size(st, 6);
    rd.expect_word(st, 2, "ROWHEIGHT");
    rd.expect_word(st, 4, "SITEWIDTH");
    lib.name = rd.word(st, 1);
    lib.row_height = rd.positive(st, 3);
    lib.site_width = rd.positive(st, 5);
  }
  for (;;) {
    const Statement& st = rd.next();
    auto kw = st.keyword();
    if (kw == "LAYER") {
      rd.expect_size(st, 4);
      Layer l;
      l.name = rd.word(st, 1);
      if (lib.find_layer(l.name)) rd.fail(st, 1, "duplicate layer '" + l.name + "'");
      auto kind = st.tokens[2].text;
      if (kind == "metal") l.kind = LayerKind::Metal;
      else if (kind == "via") l.kind = LayerKind::Via;
      else rd.fail(st, 2, "layer kind must be metal or via");
      auto dir = st.tokens[3].text;
      if (dir == "h") l.direction = RoutingDirection::Horizontal;
      else if (dir == "v") l.direction = RoutingDirection::Vertical;
      else if (dir == "none") l.direction = RoutingDirection::None;
      else rd.fail(st, 3, "direction must be h, v or none");
      lib.layers.push_back(std::move(l));
    } else if (kw == "CELL") {
      Cell c = read_cell(rd, st, lib);
      if (lib.find_cell(c.name)) throw ValidationError("cell '" + c.name + "': duplicate cell name");
      auto pos = std::ranges::upper_bound(lib.cells, c.name, {}, &Cell::name);
      lib.cells.insert(pos, std::move(c));
    } else if (kw == "FORBID_ABUT") {
      rd.expect_size(st, 4);
      AbutConstraint f{rd.word(st, 1), rd.word(st, 2), AbutSide::Either};
      auto side = st.tokens[3].text;
      if (side == "left") f.side = AbutSide::Left;
      else if (side == "right") f.side = AbutSide::Right;
      else if (side == "either") f.side = AbutSide::Either;
      else rd.fail(st, 3, "side must be left, right or either");
      lib.forbidden_abutments.push_back(std::move(f));
    } else if (kw == "END") {
      rd.expect_size(st, 2);
      rd.expect_word(st, 1, "LIBRARY");
      break;
    } else if (kw == "RECT" || kw == "POLYGON" || kw == "PIN" || kw == "OBS") {
      rd.fail(st, 0, "'" + std::string(kw) + "' outside CELL");
    } else {
      rd.fail(st, 0, "unknown statement '" + std::string(kw) + "'");
    }
  }
  if (!rd.done()) rd.fail(rd.peek(), 0, "content after END LIBRARY");
  std::ranges::sort(lib.forbidden_abutments, [](const AbutConstraint& a, const AbutConstraint& b) {
    return std::tie(a.class_a, a.class_b, a.side) < std::tie(b.class_a, b.class_b, b.side);
  });
  validate_library(lib);
  return lib;
}

std::string serialize_library(const CellLibrary& lib) {
  std::ostringstream os;
  os << "LIBRARY " << lib.name << " ROWHEIGHT " << lib.row_height << " SITEWIDTH " << lib.site_width << '\n';
  for (const auto& l : lib.layers) {
    os << "LAYER " << l.name << ' ' << (l.kind == LayerKind::Metal ? "metal" : "via") << ' '
       << (l.direction == RoutingDirection::Horizontal ? "h"
           : l.direction == RoutingDirection::Vertical ? "v"
                                                       : "none")
       << '\n';
  }
  for (const auto& c : lib.cells) {
    os << "CELL " << c.name << " HEIGHT " << c.height_rows << " WIDTH " << c.width() << " CLASS " << c.abut_class
       << '\n';
    write_shapes(os, "  ", "RECT", c.shapes);
    write_shapes(os, "  ", "OBS", c.obstructions);
    for (const auto& p : c.pins) {
      os << "  PIN " << p.name << ' '
         << (p.signal_class == SignalClass::Signal ? "signal"
             : p.signal_class == SignalClass::Power ? "power"
                                                    : "ground")
         << '\n';
      write_shapes(os, "    ", "RECT", p.shapes);
    }
    os << "END CELL\n";
  }
  for (const auto& f : lib.forbidden_abutments)
    os << "FORBID_ABUT " << f.class_a << ' ' << f.class_b << ' ' << side_name(f.side) << '\n';
  os << "END LIBRARY\n";
  return os.str();
}

namespace {

// Shared DIE / ROW / PLACE handling for placement and design files.
bool read_placement_statement(const StatementReader& rd, const Statement& st, const CellLibrary& lib,
                              Placement& p) {
  auto kw = st.keyword();
  if (kw == "DIE") {
    rd.expect_size(st, 5);
    p.die = rd.rect(st, 1);
  } else if (kw == "ROW") {
    rd.expect_size(st, 3);
    Row row{rd.integer(st, 1), rd.orientation(st, 2)};
    if (row.orient != Orientation::N && row.orient != Orientation::FS) rd.fail(st, 2, "row orientation must be N or FS");
    p.rows.push_back(row);
  } else if (kw == "PLACE") {
    rd.expect_size(st, 6);
    Instance inst{rd.word(st, 1), rd.word(st, 2), rd.orientation(st, 5), rd.integer(st, 3), rd.integer(st, 4)};
    if (!lib.find_cell(inst.cell)) rd.fail(st, 2, "unknown cell '" + inst.cell + "'");
    p.instances.push_back(std::move(inst));
  } else {
    return false;
  }
  return true;
}

void finish_placement(Placement& p, const std::string& source) {
  std::ranges::sort(p.rows, {}, &Row::y);
  std::ranges::sort(p.instances, {}, &Instance::id);
  for (std::size_t i = 1; i < p.instances.size(); ++i)
    if (p.instances[i].id == p.instances[i - 1].id)
      throw ValidationError(source + ": duplicate instance '" + p.instances[i].id + "'");
  for (std::size_t i = 1; i < p.rows.size(); ++i)
    if (p.rows[i].y == p.rows[i - 1].y) throw ValidationError(source + ": duplicate row at y=" + std::to_string(p.rows[i].y));
}

void write_placement_body(std::ostream& os, const Placement& p) {
  os << "DIE " << format_rect(p.die) << '\n';
  for (const auto& r : p.rows) os << "ROW " << r.y << ' ' << to_string(r.orient) << '\n';
  for (const auto& i : p.instances)
    os << "PLACE " << i.id << ' ' << i.cell << ' ' << i.x << ' ' << i.y << ' ' << to_string(i.orient) << '\n';
}

}  // namespace

Placement parse_placement(std::string_view text, const CellLibrary& lib, const std::string& source) {
  StatementReader rd(text, source);
  Placement p;
  {
    const Statement& st = rd.next();
    rd.expect_word(st, 0, "PLACEMENT");
    rd.expect_size(st, 2);
    p.name = rd.word(st, 1);
  }
  bool have_die = false;
  for (;;) {
    const Statement& st = rd.next();
    if (st.keyword() == "END") {
      rd.expect_size(st, 2);
      rd.expect_word(st, 1, "PLACEMENT");
      break;
    }
    if (st.keyword() == "DIE") have_die = true;
    if (!read_placement_statement(rd, st, lib, p)) rd.fail(st, 0, "unknown statement '" + std::string(st.keyword()) + "'");
  }
  if (!rd.done()) rd.fail(rd.peek(), 0, "content after END PLACEMENT");
  if (!have_die) rd.fail_at_end("missing DIE statement");
  finish_placement(p, source);
  return p;
}

std::string serialize_placement(const Placement& p) {
  std::ostringstream os;
  os << "PLACEMENT " << p.name << '\n';
  write_placement_body(os, p);
  os << "END PLACEMENT\n";
  return os.str();
}

RoutedDesign parse_routed_design(std::string_view text, const CellLibrary& lib, const std::string& source) {
  StatementReader rd(text, source);
  RoutedDesign d;
  {
    const Statement& st = rd.next();
    rd.expect_word(st, 0, "DESIGN");
    rd.expect_size(st, 2);
    d.design_id = rd.word(st, 1);
    d.placement.name = d.design_id;
  }
  std::map<std::string, RawShapes> wires;
  std::vector<std::pair<std::size_t, std::string>> referenced;  // (line, net) for WIRE/VIA
  std::vector<std::pair<const Statement*, NetTerminal>> terminals;
  for (;;) {
    const Statement& st = rd.next();
    auto kw = st.keyword();
    if (kw == "END") {
      rd.expect_size(st, 2);
      rd.expect_word(st, 1, "DESIGN");
      break;
    }
    if (read_placement_statement(rd, st, lib, d.placement)) continue;
    if (kw == "NET") {
      rd.expect_min_size(st, 2);
      Net net{rd.word(st, 1), {}};
      for (std::size_t i = 2; i < st.size(); ++i) {
        auto t = st.tokens[i].text;
        auto colon = t.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == t.size())
          rd.fail(st, i, "terminal must be <instance>:<pin>");
        net.terminals.push_back({std::string(t.substr(0, colon)), std::string(t.substr(colon + 1))});
        terminals.emplace_back(&st, net.terminals.back());
      }
      std::ranges::sort(net.terminals);
      d.nets.push_back(std::move(net));
    } else if (kw == "WIRE") {
      rd.expect_size(st, 7);
      std::string net = rd.word(st, 1);
      wires[net][known_layer(rd, st, 2, lib)].push_back(rd.rect(st, 3));
      referenced.emplace_back(st.line, net);
    } else if (kw == "VIA") {
      rd.expect_size(st, 16);
      rd.expect_word(st, 7, "ENC");
      std::string net = rd.word(st, 1);
      std::string pair = rd.word(st, 2);
      auto slash = pair.find('/');
      if (slash == std::string::npos) rd.fail(st, 2, "layer pair must be <lower>/<upper>");
      Via v;
      v.lower = pair.substr(0, slash);
      v.upper = pair.substr(slash + 1);
      auto cut = lib.cut_layer_between(v.lower, v.upper);
      if (!cut) rd.fail(st, 2, "no via layer between '" + v.lower + "' and '" + v.upper + "'");
      v.cut_layer = *cut;
      v.cut = rd.rect(st, 3);
      v.lower_enclosure = rd.rect(st, 8);
      v.upper_enclosure = rd.rect(st, 12);
      d.routing[net].vias.push_back(v);
      referenced.emplace_back(st.line, net);
    } else {
      rd.fail(st, 0, "unknown statement '" + std::string(kw) + "'");
    }
  }
  if (!rd.done()) rd.fail(rd.peek(), 0, "content after END DESIGN");
  finish_placement(d.placement, source);
  std::ranges::sort(d.nets, {}, &Net::name);
  for (std::size_t i = 1; i < d.nets.size(); ++i)
    if (d.nets[i].name == d.nets[i - 1].name) throw ValidationError(source + ": duplicate net '" + d.nets[i].name + "'");
  for (const auto& [st, t] : terminals) {
    const Instance* inst = d.placement.find_instance(t.instance);
    if (!inst) rd.fail(*st, 0, "unknown instance '" + t.instance + "'");
    if (!lib.cell(inst->cell).find_pin(t.pin)) rd.fail(*st, 0, "cell '" + inst->cell + "' has no pin '" + t.pin + "'");
  }
  auto has_net = [&](const std::string& n) {
    return std::ranges::binary_search(d.nets, n, {}, &Net::name);
  };
  for (const auto& [line, net] : referenced)
    if (!has_net(net)) throw ParseError(source, line, 1, "routing references undeclared net '" + net + "'");
  for (auto& [net, raw] : wires) d.routing[net].wires = finish_shapes(std::move(raw));
  for (auto& [net, r] : d.routing) std::ranges::sort(r.vias);
  return d;
}

std::string serialize_routed_design(const RoutedDesign& d) {
  std::ostringstream os;
  os << "DESIGN " << d.design_id << '\n';
  write_placement_body(os, d.placement);
  for (const auto& n : d.nets) {
    os << "NET " << n.name;
    for (const auto& t : n.terminals) os << ' ' << t.instance << ':' << t.pin;
    os << '\n';
  }
  for (const auto& [net, r] : d.routing)
    for (const auto& [layer, s] : r.wires)
      for (const auto& rect : s.rects()) os << "WIRE " << net << ' ' << layer << ' ' << format_rect(rect) << '\n';
  for (const auto& [net, r] : d.routing)
    for (const auto& v : r.vias)
      os << "VIA " << net << ' ' << v.lower << '/' << v.upper << ' ' << format_rect(v.cut) << " ENC "
         << format_rect(v.lower_enclosure) << ' ' << format_rect(v.upper_enclosure) << '\n';
  os << "END DESIGN\n";
  return os.str();
}

Transform instance_transform(const Instance& inst, const CellLibrary& lib) {
  const Cell& c = lib.cell(inst.cell);
  return Transform::placing(inst.orient, inst.x, inst.y, c.width(), c.height());
}

Rect instance_footprint(const Instance& inst, const CellLibrary& lib) {
  return instance_transform(inst, lib).apply(lib.cell(inst.cell).pr_boundary);
}

std::vector<std::string> check_placement_legality(const Placement& p, const CellLibrary& lib) {
  std::vector<std::string> issues;
  std::map<Coord, Orientation> rows;
  for (const auto& r : p.rows) {
    rows[r.y] = r.orient;
    if (r.y < p.die.y_lo || r.y + lib.row_height > p.die.y_hi)
      issues.push_back("row at y=" + std::to_string(r.y) + " lies outside the die");
  }
  RectIndex index(p.die, std::max<Coord>(lib.row_height, 1) * 4);
  for (const auto& inst : p.instances) {
    const Cell* cell = lib.find_cell(inst.cell);
    if (!cell) {
      issues.push_back(inst.id + ": unknown cell '" + inst.cell + "'");
      continue;
    }
    std::string who = inst.id + " (" + inst.cell + ")";
    Rect fp = instance_footprint(inst, lib);
    if (!p.die.contains(fp)) issues.push_back(who + ": footprint outside the die");
    if ((inst.x - p.die.x_lo) % lib.site_width != 0) issues.push_back(who + ": x not on the site grid");
    auto bottom = rows.find(inst.y);
    if (bottom == rows.end()) {
      issues.push_back(who + ": y is not a row origin");
    } else {
      for (int k = 1; k < cell->height_rows; ++k)
        if (!rows.contains(inst.y + k * lib.row_height))
          issues.push_back(who + ": spans a missing row at y=" + std::to_string(inst.y + k * lib.row_height));
      if (cell->height_rows % 2 == 1) {
        bool n_row = bottom->second == Orientation::N;
        bool n_family = inst.orient == Orientation::N || inst.orient == Orientation::FN;
        if (n_row != n_family)
          issues.push_back(who + ": orientation " + std::string(to_string(inst.orient)) + " not allowed on " +
                           std::string(to_string(bottom->second)) + " row");
      }
    }
    index.visit(fp, [&](std::size_t id, const Rect& r) {
      if (r.overlaps(fp)) issues.push_back(who + ": overlaps " + p.instances[static_cast<std::size_t>(index.tag(id))].id);
    });
    index.insert(fp, &inst - p.instances.data());
  }
  return issues;
}

namespace {

template <typename Sink>
void emit_instance_shapes(const Placement& p, const CellLibrary& lib, std::string_view layer, Sink&& sink) {
  for (const auto& inst : p.instances) {
    const Cell& c = lib.cell(inst.cell);
    Transform t = instance_transform(inst, lib);
    if (auto it = c.shapes.find(std::string(layer)); it != c.shapes.end())
      for (const auto& r : it->second.rects()) sink(t.apply(r));
    for (const auto& pin : c.pins)
      if (auto it = pin.shapes.find(std::string(layer)); it != pin.shapes.end())
        for (const auto& r : it->second.rects()) sink(t.apply(r));
  }
}

template <typename Sink>
void emit_routing_shapes(const RoutedDesign& d, std::string_view layer, Sink&& sink) {
  for (const auto& [net, r] : d.routing) {
    if (auto it = r.wires.find(std::string(layer)); it != r.wires.end())
      for (const auto& rect : it->second.rects()) sink(rect);
    for (const auto& v : r.vias) {
      if (v.lower == layer) sink(v.lower_enclosure);
      if (v.upper == layer) sink(v.upper_enclosure);
      if (v.cut_layer == layer) sink(v.cut);
    }
  }
}

std::set<std::string> all_layers(const CellLibrary& lib) {
  std::set<std::string> out;
  for (const auto& l : lib.layers) out.insert(l.name);
  return out;
}

}  // namespace

RectSet flatten(const Placement& p, const CellLibrary& lib, std::string_view layer, const Rect& window) {
  if (!lib.find_layer(layer)) throw std::invalid_argument("unknown layer '" + std::string(layer) + "'");
  std::vector<Rect> out;
  emit_instance_shapes(p, lib, layer, [&](const Rect& r) {
    if (auto c = r.intersection(window)) out.push_back(*c);
  });
  return RectSet::canonical_of(std::move(out));
}

RectSet flatten(const RoutedDesign& d, const CellLibrary& lib, std::string_view layer, const Rect& window) {
  if (!lib.find_layer(layer)) throw std::invalid_argument("unknown layer '" + std::string(layer) + "'");
  std::vector<Rect> out;
  auto sink = [&](const Rect& r) {
    if (auto c = r.intersection(window)) out.push_back(*c);
  };
  emit_instance_shapes(d.placement, lib, layer, sink);
  emit_routing_shapes(d, layer, sink);
  return RectSet::canonical_of(std::move(out));
}

FlatLayout flatten_all(const Placement& p, const CellLibrary& lib) {
  FlatLayout f{p.die, {}};
  for (const auto& layer : all_layers(lib)) {
    std::vector<Rect> out;
    emit_instance_shapes(p, lib, layer, [&](const Rect& r) { out.push_back(r); });
    f.layers.emplace(layer, RectSet::canonical_of(std::move(out)));
  }
  return f;
}

FlatLayout flatten_all(const RoutedDesign& d, const CellLibrary& lib) {
  FlatLayout f{d.placement.die, {}};
  for (const auto& layer : all_layers(lib)) {
    std::vector<Rect> out;
    auto sink = [&](const Rect& r) { out.push_back(r); };
    emit_instance_shapes(d.placement, lib, layer, sink);
    emit_routing_shapes(d, layer, sink);
    f.layers.emplace(layer, RectSet::canonical_of(std::move(out)));
  }
  return f;
}

}  // namespace lithocheck
