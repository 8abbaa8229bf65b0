#include "lithocheck/router.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "lithocheck/spatial_index.hpp"
#include "lithocheck/text_format.hpp"

namespace lithocheck {

const ViaDef* RouterTech::via_between(std::string_view lower, std::string_view upper) const {
  for (const auto& v : vias)
    if (v.lower == lower && v.upper == upper) return &v;
  return nullptr;
}

Coord RouterTech::effective_spacing() const {
  if (spacing >= 0) return spacing;
  Coord s = 0;
  for (const auto& t : tracks) s = std::max(s, t.width);
  return s;
}

RouterTech parse_tech(std::string_view text, const CellLibrary& lib, const std::string& source) {
  StatementReader rd(text, source);
  RouterTech tech;
  auto metal = [&](const Statement& st, std::size_t tok) {
    std::string name = rd.word(st, tok);
    const Layer* l = lib.find_layer(name);
    if (!l) rd.fail(st, tok, "unknown layer '" + name + "'");
    if (l->kind != LayerKind::Metal) rd.fail(st, tok, "layer '" + name + "' is not a metal layer");
    return name;
  };
  while (!rd.done()) {
    const Statement& st = rd.next();
    auto kw = st.keyword();
    if (kw == "TRACKS") {
      rd.expect_size(st, 10);
      rd.expect_word(st, 2, "PITCH");
      rd.expect_word(st, 4, "OFFSET");
      rd.expect_word(st, 6, "DIR");
      rd.expect_word(st, 8, "WIDTH");
      TrackDef t;
      t.layer = metal(st, 1);
      t.pitch = rd.positive(st, 3);
      t.offset = rd.integer(st, 5);
      auto dir = st.tokens[7].text;
      if (dir == "h") t.direction = RoutingDirection::Horizontal;
      else if (dir == "v") t.direction = RoutingDirection::Vertical;
      else rd.fail(st, 7, "direction must be h or v");
      t.width = rd.positive(st, 9);
      if (t.pitch <= t.width) rd.fail(st, 3, "pitch must exceed the wire width");
      for (const auto& o : tech.tracks)
        if (o.layer == t.layer) rd.fail(st, 1, "duplicate TRACKS for " + t.layer);
      tech.tracks.push_back(std::move(t));
    } else if (kw == "VIA") {
      rd.expect_size(st, 8);
      rd.expect_word(st, 2, "CUT");
      rd.expect_word(st, 5, "ENC");
      auto pair = st.tokens[1].text;
      auto slash = pair.find('/');
      if (slash == std::string_view::npos) rd.fail(st, 1, "expected <lower>/<upper>");
      ViaDef v;
      v.lower = std::string(pair.substr(0, slash));
      v.upper = std::string(pair.substr(slash + 1));
      for (const auto& name : {v.lower, v.upper}) {
        const Layer* l = lib.find_layer(name);
        if (!l || l->kind != LayerKind::Metal) rd.fail(st, 1, "'" + name + "' is not a metal layer of the library");
      }
      if (!lib.cut_layer_between(v.lower, v.upper)) rd.fail(st, 1, "no cut layer between " + v.lower + " and " + v.upper);
      v.cut_w = rd.positive(st, 3);
      v.cut_h = rd.positive(st, 4);
      v.lower_enclosure = rd.integer(st, 6);
      v.upper_enclosure = rd.integer(st, 7);
      if (v.lower_enclosure < 0 || v.upper_enclosure < 0) rd.fail(st, 6, "enclosure must be non-negative");
      tech.vias.push_back(std::move(v));
    } else if (kw == "SPACING") {
      rd.expect_size(st, 2);
      tech.spacing = rd.integer(st, 1);
      if (tech.spacing < 0) rd.fail(st, 1, "spacing must be non-negative");
    } else if (kw == "VIA_PENALTY") {
      rd.expect_size(st, 2);
      tech.via_penalty = static_cast<int>(rd.integer(st, 1));
      if (tech.via_penalty < 0) rd.fail(st, 1, "via penalty must be non-negative");
    } else if (kw == "MAX_SKIP") {
      rd.expect_size(st, 2);
      std::int64_t pct = rd.integer(st, 1);
      if (pct < 0 || pct > 100) rd.fail(st, 1, "MAX_SKIP is a percentage in 0..100");
      tech.max_skip_fraction = static_cast<double>(pct) / 100.0;
    } else {
      rd.fail(st, 0, "unknown statement '" + std::string(kw) + "'");
    }
  }
  if (tech.tracks.empty()) rd.fail_at_end("no TRACKS statement");
  std::ranges::sort(tech.tracks, {}, [&](const TrackDef& t) { return lib.layer_index(t.layer); });
  for (std::size_t i = 0; i + 1 < tech.tracks.size(); ++i)
    if (!tech.via_between(tech.tracks[i].layer, tech.tracks[i + 1].layer))
      throw ValidationError(source + ": no VIA between routing layers " + tech.tracks[i].layer + " and " +
                            tech.tracks[i + 1].layer);
  return tech;
}

std::string serialize_tech(const RouterTech& tech) {
  std::ostringstream os;
  for (const auto& t : tech.tracks)
    os << "TRACKS " << t.layer << " PITCH " << t.pitch << " OFFSET " << t.offset << " DIR "
       << (t.direction == RoutingDirection::Horizontal ? "h" : "v") << " WIDTH " << t.width << '\n';
  for (const auto& v : tech.vias)
    os << "VIA " << v.lower << '/' << v.upper << " CUT " << v.cut_w << ' ' << v.cut_h << " ENC " << v.lower_enclosure
       << ' ' << v.upper_enclosure << '\n';
  if (tech.spacing >= 0) os << "SPACING " << tech.spacing << '\n';
  os << "VIA_PENALTY " << tech.via_penalty << '\n';
  os << "MAX_SKIP " << static_cast<int>(tech.max_skip_fraction * 100.0 + 0.5) << '\n';
  return os.str();
}

namespace {

std::vector<Coord> track_coords(const RouterTech& tech, RoutingDirection dir, Coord lo, Coord hi) {
  std::set<Coord> out;
  for (const auto& t : tech.tracks) {
    if (t.direction != dir) continue;
    Coord half = t.width / 2;
    Coord first = lo + half;
    Coord k = (first - t.offset + t.pitch - 1);
    k = k >= 0 ? k / t.pitch : -((-k + t.pitch - 1) / t.pitch);
    for (Coord v = t.offset + k * t.pitch; v + (t.width - half) <= hi; v += t.pitch)
      if (v - half >= lo) out.insert(v);
  }
  return {out.begin(), out.end()};
}

Rect square(Coord x, Coord y, Coord half) { return {x - half, y - half, x + half, y + half}; }

Rect body(Coord x, Coord y, Coord width) { return {x - width / 2, y - width / 2, x - width / 2 + width, y - width / 2 + width}; }

Rect cut_rect(const ViaDef& v, Coord x, Coord y) { return {x - v.cut_w / 2, y - v.cut_h / 2, x - v.cut_w / 2 + v.cut_w, y - v.cut_h / 2 + v.cut_h}; }

// Instance shapes in layout coordinates, split by owner.
template <typename Fn>
void for_each_static_shape(const CellLibrary& lib, const Placement& p, Fn&& fn) {
  for (const auto& inst : p.instances) {
    const Cell& c = lib.cell(inst.cell);
    Transform t = instance_transform(inst, lib);
    for (const auto& [layer, s] : c.shapes)
      for (const auto& r : s.rects()) fn(layer, t.apply(r), &inst, nullptr);
    for (const auto& [layer, s] : c.obstructions)
      for (const auto& r : s.rects()) fn(layer, t.apply(r), &inst, nullptr);
    for (const auto& pin : c.pins)
      for (const auto& [layer, s] : pin.shapes)
        for (const auto& r : s.rects()) fn(layer, t.apply(r), &inst, &pin);
  }
}

Coord bin_for(const Rect& die) { return std::max<Coord>(40, std::max(die.width(), die.height()) / 256); }

}  // namespace

RoutingGrid::RoutingGrid(const CellLibrary& lib, const Placement& placement, const RouterTech& tech) : tech_(tech) {
  xs_ = track_coords(tech, RoutingDirection::Vertical, placement.die.x_lo, placement.die.x_hi);
  ys_ = track_coords(tech, RoutingDirection::Horizontal, placement.die.y_lo, placement.die.y_hi);
  if (xs_.empty() || ys_.empty()) throw std::invalid_argument("die is smaller than one routing track");
  for_each_static_shape(lib, placement, [&](const std::string& layer, const Rect& r, const Instance*, const Pin*) {
    obstacles_[layer].push_back(r);
  });
  for (auto& [_, v] : obstacles_) std::ranges::sort(v);
}

const std::vector<Rect>& RoutingGrid::obstacles(std::string_view layer) const {
  static const std::vector<Rect> kNone;
  auto it = obstacles_.find(layer);
  return it == obstacles_.end() ? kNone : it->second;
}

bool RoutingGrid::node_blocked(std::size_t layer, std::size_t xi, std::size_t yi) const {
  const TrackDef& t = tech_.tracks[layer];
  Rect keep = square(xs_[xi], ys_[yi], t.width / 2 + tech_.effective_spacing());
  for (const auto& r : obstacles(t.layer))
    if (r.overlaps(keep)) return true;
  return false;
}

std::size_t RoutingGrid::blocked_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layer_count(); ++l)
    for (std::size_t j = 0; j < ys_.size(); ++j)
      for (std::size_t i = 0; i < xs_.size(); ++i) n += node_blocked(l, i, j);
  return n;
}

double RouteResult::skip_fraction() const {
  return net_count == 0 ? 0.0 : static_cast<double>(skipped.size()) / static_cast<double>(net_count);
}

namespace {

constexpr std::int64_t kStatic = -1;

class Router {
 public:
  Router(const CellLibrary& lib, const Placement& placement, const std::vector<Net>& nets, const RouterTech& tech)
      : lib_(lib), placement_(placement), nets_(nets), tech_(tech), grid_(lib, placement, tech) {
    s_ = tech.effective_spacing();
    nx_ = grid_.xs().size();
    ny_ = grid_.ys().size();
    nl_ = grid_.layer_count();
    node_count_ = nx_ * ny_ * nl_;
    for (const auto& l : lib.layers) index_[l.name].reset(placement.die.expanded(1000), bin_for(placement.die));
    for (std::size_t l = 0; l + 1 < nl_; ++l) {
      const ViaDef* v = tech.via_between(tech.tracks[l].layer, tech.tracks[l + 1].layer);
      stack_vias_.push_back(v);
      stack_cuts_.push_back(*lib.cut_layer_between(v->lower, v->upper));
    }
    std::map<NetTerminal, std::int64_t> owner;
    for (std::size_t n = 0; n < nets.size(); ++n)
      for (const auto& t : nets[n].terminals) owner[t] = static_cast<std::int64_t>(n);
    for_each_static_shape(lib, placement, [&](const std::string& layer, const Rect& r, const Instance* inst, const Pin* pin) {
      std::int64_t tag = kStatic;
      if (pin) {
        auto it = owner.find(NetTerminal{inst->id, pin->name});
        if (it != owner.end()) tag = it->second;
      }
      index_[layer].insert(r, tag);
    });
    g_.assign(node_count_ + 1, 0);
    stamp_.assign(node_count_ + 1, 0);
    parent_.assign(node_count_ + 1, 0);
    closed_.assign(node_count_ + 1, 0);
    block_stamp_.assign(node_count_, 0);
    block_value_.assign(node_count_, 0);
    target_stamp_.assign(node_count_, 0);
    target_cost_.assign(node_count_, 0);
    reserved_.assign(nx_ * ny_, -1);
    for (std::size_t n = 0; n < nets.size(); ++n)
      for (const auto& t : nets[n].terminals) reserve_pin_access(t, static_cast<std::int64_t>(n));
  }

  RouteResult run(const std::string& design_id) {
    RouteResult res;
    res.design.design_id = design_id;
    res.design.placement = placement_;
    res.design.placement.name = design_id;
    res.design.nets = nets_;
    std::ranges::sort(res.design.nets, {}, &Net::name);
    res.net_count = nets_.size();

    std::vector<std::pair<Coord, std::size_t>> order;
    for (std::size_t n = 0; n < nets_.size(); ++n) order.emplace_back(hpwl(nets_[n]), n);
    std::ranges::sort(order, [&](const auto& a, const auto& b) {
      return std::tie(a.first, nets_[a.second].name) < std::tie(b.first, nets_[b.second].name);
    });
    for (auto [_, n] : order) {
      std::string why;
      auto routing = route_net(n, why);
      if (!routing) {
        res.skipped.push_back({nets_[n].name, why});
        continue;
      }
      commit(*routing, static_cast<std::int64_t>(n));
      res.design.routing.emplace(nets_[n].name, finish(std::move(*routing)));
    }
    std::ranges::sort(res.skipped, {}, &SkippedNet::net);
    return res;
  }

 private:
  struct Access {
    std::size_t node;
    int cost;
    std::optional<Via> via;  // pin landing via, if any
  };

  struct Building {
    std::map<std::string, std::vector<Rect>> wires;
    std::vector<Via> vias;
  };

  std::size_t node_id(std::size_t l, std::size_t i, std::size_t j) const { return (l * ny_ + j) * nx_ + i; }
  std::size_t layer_of(std::size_t id) const { return id / (nx_ * ny_); }
  std::size_t y_of(std::size_t id) const { return (id / nx_) % ny_; }
  std::size_t x_of(std::size_t id) const { return id % nx_; }

  bool foreign(std::string_view layer, const Rect& q, std::int64_t net) const {
    auto it = index_.find(layer);
    if (it == index_.end()) return false;
    bool hit = false;
    it->second.visit(q, [&](std::size_t id, const Rect& r) {
      if (!hit && it->second.tag(id) != net && r.overlaps(q)) hit = true;
    });
    return hit;
  }

  bool node_ok(std::size_t id, std::int64_t net) {
    if (block_stamp_[id] != net_stamp_) {
      block_stamp_[id] = net_stamp_;
      const TrackDef& t = tech_.tracks[layer_of(id)];
      Rect keep = body(grid_.xs()[x_of(id)], grid_.ys()[y_of(id)], t.width).expanded(s_);
      bool taken = id < reserved_.size() && reserved_[id] >= 0 && reserved_[id] != net;
      block_value_[id] = taken || foreign(t.layer, keep, net) ? 0 : 1;
    }
    return block_value_[id] != 0;
  }

  Rect run_rect(std::size_t l, std::size_t a, std::size_t b) const {
    const TrackDef& t = tech_.tracks[l];
    Rect ra = body(grid_.xs()[x_of(a)], grid_.ys()[y_of(a)], t.width);
    Rect rb = body(grid_.xs()[x_of(b)], grid_.ys()[y_of(b)], t.width);
    return ra.hull(rb);
  }

  bool edge_ok(std::size_t l, std::size_t a, std::size_t b, std::int64_t net) const {
    return !foreign(tech_.tracks[l].layer, run_rect(l, a, b).expanded(s_), net);
  }

  Via make_via(const ViaDef& v, const std::string& cut_layer, Coord x, Coord y) const {
    Rect c = cut_rect(v, x, y);
    return {v.lower, v.upper, cut_layer, c, c.expanded(v.lower_enclosure), c.expanded(v.upper_enclosure)};
  }

  bool via_ok(const Via& v, std::int64_t net, bool check_lower) const {
    if (check_lower && foreign(v.lower, v.lower_enclosure.expanded(s_), net)) return false;
    if (foreign(v.upper, v.upper_enclosure.expanded(s_), net)) return false;
    return !foreign(v.cut_layer, v.cut.expanded(s_), net);
  }

  bool stack_via_ok(std::size_t l, std::size_t i, std::size_t j, std::int64_t net) const {
    Via v = make_via(*stack_vias_[l], stack_cuts_[l], grid_.xs()[i], grid_.ys()[j]);
    return via_ok(v, net, true);
  }

  std::pair<std::size_t, std::size_t> index_span(const std::vector<Coord>& v, Coord lo, Coord hi) const {
    auto a = std::lower_bound(v.begin(), v.end(), lo) - v.begin();
    auto b = std::upper_bound(v.begin(), v.end(), hi) - v.begin();
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
  }

  // Nodes where another net could only land a via onto this pin stay free for it.
  void reserve_pin_access(const NetTerminal& term, std::int64_t net) {
    const Instance* inst = placement_.find_instance(term.instance);
    if (!inst) return;
    const Pin* pin = lib_.cell(inst->cell).find_pin(term.pin);
    if (!pin) return;
    Transform t = instance_transform(*inst, lib_);
    for (const auto& [layer, shapes] : pin->shapes) {
      const ViaDef* v = tech_.via_between(layer, tech_.tracks[0].layer);
      if (!v) continue;
      RectSet placed = apply_transform(shapes, t);
      for (const auto& r : placed.rects()) {
        auto [i0, i1] = index_span(grid_.xs(), r.x_lo, r.x_hi);
        auto [j0, j1] = index_span(grid_.ys(), r.y_lo, r.y_hi);
        for (std::size_t j = j0; j < j1; ++j)
          for (std::size_t i = i0; i < i1; ++i) {
            Rect enc = cut_rect(*v, grid_.xs()[i], grid_.ys()[j]).expanded(v->lower_enclosure);
            if (subset_of(RectSet{enc}, placed) && reserved_[node_id(0, i, j)] < 0) reserved_[node_id(0, i, j)] = net;
          }
      }
    }
  }

  std::vector<Access> access_points(const NetTerminal& term, std::int64_t net) {
    std::vector<Access> out;
    const Instance* inst = placement_.find_instance(term.instance);
    if (!inst) return out;
    const Cell& cell = lib_.cell(inst->cell);
    const Pin* pin = cell.find_pin(term.pin);
    if (!pin) return out;
    Transform t = instance_transform(*inst, lib_);
    for (const auto& [layer, shapes] : pin->shapes) {
      RectSet placed = apply_transform(shapes, t);
      for (std::size_t l = 0; l < nl_; ++l) {
        const TrackDef& td = tech_.tracks[l];
        if (td.layer == layer) {
          // Pin on a routing layer: any usable node whose wire body touches it.
          for (const auto& r : placed.rects()) {
            Coord hw = td.width / 2;
            auto [i0, i1] = index_span(grid_.xs(), r.x_lo - hw, r.x_hi + hw);
            auto [j0, j1] = index_span(grid_.ys(), r.y_lo - hw, r.y_hi + hw);
            for (std::size_t j = j0; j < j1; ++j)
              for (std::size_t i = i0; i < i1; ++i) {
                std::size_t id = node_id(l, i, j);
                if (body(grid_.xs()[i], grid_.ys()[j], td.width).overlaps(r) && node_ok(id, net))
                  out.push_back({id, 0, std::nullopt});
              }
          }
        }
      }
      // Pin below the first routing layer: land a via whose lower enclosure sits inside the pin.
      const ViaDef* v = tech_.via_between(layer, tech_.tracks[0].layer);
      if (!v) continue;
      auto cut_layer = lib_.cut_layer_between(v->lower, v->upper);
      for (const auto& r : placed.rects()) {
        auto [i0, i1] = index_span(grid_.xs(), r.x_lo, r.x_hi);
        auto [j0, j1] = index_span(grid_.ys(), r.y_lo, r.y_hi);
        for (std::size_t j = j0; j < j1; ++j)
          for (std::size_t i = i0; i < i1; ++i) {
            Via via = make_via(*v, *cut_layer, grid_.xs()[i], grid_.ys()[j]);
            if (!subset_of(RectSet{via.lower_enclosure}, placed)) continue;
            std::size_t id = node_id(0, i, j);
            if (!node_ok(id, net) || !via_ok(via, net, false)) continue;
            out.push_back({id, tech_.via_penalty, via});
          }
      }
    }
    std::ranges::sort(out, [](const Access& a, const Access& b) { return std::tie(a.node, a.cost) < std::tie(b.node, b.cost); });
    out.erase(std::unique(out.begin(), out.end(), [](const Access& a, const Access& b) { return a.node == b.node; }),
              out.end());
    return out;
  }

  Coord hpwl(const Net& net) const {
    Coord x_lo = std::numeric_limits<Coord>::max(), y_lo = x_lo, x_hi = std::numeric_limits<Coord>::min(), y_hi = x_hi;
    for (const auto& term : net.terminals) {
      const Instance* inst = placement_.find_instance(term.instance);
      if (!inst) continue;
      const Pin* pin = lib_.cell(inst->cell).find_pin(term.pin);
      if (!pin) continue;
      Transform t = instance_transform(*inst, lib_);
      for (const auto& [_, s] : pin->shapes) {
        if (auto b = s.bbox()) {
          Rect r = t.apply(*b);
          Coord cx = r.x_lo + r.x_hi, cy = r.y_lo + r.y_hi;  // doubled centre
          x_lo = std::min(x_lo, cx);
          x_hi = std::max(x_hi, cx);
          y_lo = std::min(y_lo, cy);
          y_hi = std::max(y_hi, cy);
        }
      }
    }
    if (x_lo > x_hi) return 0;
    return (x_hi - x_lo + y_hi - y_lo) / 2;
  }

  struct Window {
    std::size_t i0, i1, j0, j1;  // inclusive
    bool contains(std::size_t i, std::size_t j) const { return i >= i0 && i <= i1 && j >= j0 && j <= j1; }
  };

  // Multi-source A* to the cheapest target. Returns the node path, source first.
  std::optional<std::vector<std::size_t>> search(const std::vector<Access>& sources,
                                                  const std::vector<Access>& targets, std::int64_t net,
                                                  const Window& win) {
    ++search_stamp_;
    std::size_t ti0 = nx_, ti1 = 0, tj0 = ny_, tj1 = 0;
    for (const auto& t : targets) {
      target_stamp_[t.node] = search_stamp_;
      target_cost_[t.node] = t.cost;
      ti0 = std::min(ti0, x_of(t.node));
      ti1 = std::max(ti1, x_of(t.node));
      tj0 = std::min(tj0, y_of(t.node));
      tj1 = std::max(tj1, y_of(t.node));
    }
    auto h = [&](std::size_t id) -> std::int64_t {
      auto dist = [](std::size_t v, std::size_t lo, std::size_t hi) -> std::int64_t {
        if (v < lo) return static_cast<std::int64_t>(lo - v);
        if (v > hi) return static_cast<std::int64_t>(v - hi);
        return 0;
      };
      return dist(x_of(id), ti0, ti1) + dist(y_of(id), tj0, tj1);
    };
    struct Item {
      std::int64_t f;
      std::size_t layer, y, x, id;
      bool operator>(const Item& o) const {
        return std::tie(f, layer, y, x, id) > std::tie(o.f, o.layer, o.y, o.x, o.id);
      }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    const std::size_t sink = node_count_;
    auto relax = [&](std::size_t id, std::int64_t g, std::size_t from) {
      if (stamp_[id] == search_stamp_ && (closed_[id] == search_stamp_ || g_[id] <= g)) return;
      stamp_[id] = search_stamp_;
      g_[id] = g;
      parent_[id] = from;
      if (id == sink) open.push({g, nl_, ny_, nx_, sink});
      else open.push({g + h(id), layer_of(id), y_of(id), x_of(id), id});
    };
    for (const auto& s : sources) relax(s.node, s.cost, s.node);
    while (!open.empty()) {
      Item it = open.top();
      open.pop();
      std::size_t id = it.id;
      if (closed_[id] == search_stamp_) continue;
      closed_[id] = search_stamp_;
      std::int64_t g = g_[id];
      if (id == sink) {
        std::vector<std::size_t> path;
        std::size_t cur = parent_[sink];
        for (;;) {
          path.push_back(cur);
          if (parent_[cur] == cur) break;
          cur = parent_[cur];
        }
        std::ranges::reverse(path);
        return path;
      }
      if (target_stamp_[id] == search_stamp_) relax(sink, g + target_cost_[id], id);
      std::size_t l = layer_of(id), i = x_of(id), j = y_of(id);
      const TrackDef& td = tech_.tracks[l];
      auto step = [&](std::size_t ni, std::size_t nj) {
        if (!win.contains(ni, nj)) return;
        std::size_t nid = node_id(l, ni, nj);
        if (closed_[nid] == search_stamp_ || !node_ok(nid, net) || !edge_ok(l, id, nid, net)) return;
        relax(nid, g + 1, id);
      };
      if (td.direction == RoutingDirection::Horizontal) {
        if (i > 0) step(i - 1, j);
        if (i + 1 < nx_) step(i + 1, j);
      } else {
        if (j > 0) step(i, j - 1);
        if (j + 1 < ny_) step(i, j + 1);
      }
      for (int dl : {-1, 1}) {
        if ((dl < 0 && l == 0) || (dl > 0 && l + 1 >= nl_)) continue;
        std::size_t nlay = dl < 0 ? l - 1 : l + 1;
        std::size_t nid = node_id(nlay, i, j);
        if (closed_[nid] == search_stamp_ || !node_ok(nid, net)) continue;
        if (!stack_via_ok(std::min(l, nlay), i, j, net)) continue;
        relax(nid, g + tech_.via_penalty, id);
      }
    }
    return std::nullopt;
  }

  Window window_around(const std::vector<Access>& a, const std::vector<Access>& b, std::size_t margin) const {
    Window w{nx_, 0, ny_, 0};
    for (const auto* v : {&a, &b})
      for (const auto& acc : *v) {
        w.i0 = std::min(w.i0, x_of(acc.node));
        w.i1 = std::max(w.i1, x_of(acc.node));
        w.j0 = std::min(w.j0, y_of(acc.node));
        w.j1 = std::max(w.j1, y_of(acc.node));
      }
    w.i0 = w.i0 > margin ? w.i0 - margin : 0;
    w.j0 = w.j0 > margin ? w.j0 - margin : 0;
    w.i1 = std::min(nx_ - 1, w.i1 + margin);
    w.j1 = std::min(ny_ - 1, w.j1 + margin);
    return w;
  }

  void add_path(const std::vector<std::size_t>& path, Building& b) const {
    std::size_t k = 0;
    while (k < path.size()) {
      std::size_t l = layer_of(path[k]);
      std::size_t e = k;
      while (e + 1 < path.size() && layer_of(path[e + 1]) == l) ++e;
      b.wires[tech_.tracks[l].layer].push_back(run_rect(l, path[k], path[e]));
      if (e + 1 < path.size()) {
        std::size_t nl = layer_of(path[e + 1]);
        std::size_t lo = std::min(l, nl);
        b.vias.push_back(make_via(*stack_vias_[lo], stack_cuts_[lo], grid_.xs()[x_of(path[e])], grid_.ys()[y_of(path[e])]));
      }
      k = e + 1;
    }
  }

  std::optional<Building> route_net(std::size_t n, std::string& why) {
    const Net& net = nets_[n];
    auto tag = static_cast<std::int64_t>(n);
    ++net_stamp_;
    if (net.terminals.size() < 2) {
      why = "fewer than two terminals";
      return std::nullopt;
    }
    std::vector<std::vector<Access>> access;
    for (const auto& t : net.terminals) {
      access.push_back(access_points(t, tag));
      if (access.back().empty()) {
        why = "no access point for " + t.instance + ":" + t.pin;
        return std::nullopt;
      }
    }
    Building b;
    std::vector<Access> tree = access[0];
    bool first = true;
    for (std::size_t k = 1; k < access.size(); ++k) {
      const auto& sources = access[k];
      std::optional<std::vector<std::size_t>> path;
      Window small = window_around(sources, tree, 24);
      path = search(sources, tree, tag, small);
      Window full{0, nx_ - 1, 0, ny_ - 1};
      if (!path && (small.i0 > 0 || small.j0 > 0 || small.i1 + 1 < nx_ || small.j1 + 1 < ny_))
        path = search(sources, tree, tag, full);
      if (!path) {
        why = "no path to " + net.terminals[k].instance + ":" + net.terminals[k].pin;
        return std::nullopt;
      }
      auto find_access = [](const std::vector<Access>& v, std::size_t node) -> const Access* {
        for (const auto& a : v)
          if (a.node == node) return &a;
        return nullptr;
      };
      if (const Access* a = find_access(sources, path->front()); a && a->via) b.vias.push_back(*a->via);
      if (first) {
        if (const Access* a = find_access(access[0], path->back()); a && a->via) b.vias.push_back(*a->via);
        tree.clear();
        first = false;
      }
      add_path(*path, b);
      for (std::size_t id : *path) tree.push_back({id, 0, std::nullopt});
      std::ranges::sort(tree, {}, &Access::node);
      tree.erase(std::unique(tree.begin(), tree.end(), [](const Access& x, const Access& y) { return x.node == y.node; }),
                 tree.end());
    }
    return b;
  }

  void commit(const Building& b, std::int64_t net) {
    for (const auto& [layer, rects] : b.wires)
      for (const auto& r : rects) index_[layer].insert(r, net);
    for (const auto& v : b.vias) {
      index_[v.lower].insert(v.lower_enclosure, net);
      index_[v.upper].insert(v.upper_enclosure, net);
      index_[v.cut_layer].insert(v.cut, net);
    }
  }

  NetRouting finish(Building b) const {
    NetRouting r;
    for (auto& [layer, rects] : b.wires) r.wires.emplace(layer, RectSet::canonical_of(std::move(rects)));
    std::ranges::sort(b.vias);
    b.vias.erase(std::unique(b.vias.begin(), b.vias.end()), b.vias.end());
    r.vias = std::move(b.vias);
    return r;
  }

  const CellLibrary& lib_;
  const Placement& placement_;
  const std::vector<Net>& nets_;
  const RouterTech& tech_;
  RoutingGrid grid_;
  Coord s_ = 0;
  std::size_t nx_ = 0, ny_ = 0, nl_ = 0, node_count_ = 0;
  std::map<std::string, RectIndex, std::less<>> index_;
  std::vector<const ViaDef*> stack_vias_;
  std::vector<std::string> stack_cuts_;

  std::vector<std::int64_t> g_;
  std::vector<std::uint32_t> stamp_, closed_;
  std::vector<std::size_t> parent_;
  std::uint32_t search_stamp_ = 0;
  std::vector<std::uint32_t> block_stamp_;
  std::vector<char> block_value_;
  std::uint32_t net_stamp_ = 0;
  std::vector<std::uint32_t> target_stamp_;
  std::vector<int> target_cost_;
  std::vector<std::int64_t> reserved_;  // bottom-layer nodes over a net's lower-layer pin
};

}  // namespace

RouteResult route_unchecked(const CellLibrary& lib, const Placement& placement, const std::vector<Net>& nets,
                            const RouterTech& tech, const std::string& design_id) {
  for (const auto& t : tech.tracks)
    if (!lib.find_layer(t.layer)) throw std::invalid_argument("tech layer '" + t.layer + "' not in library");
  Router r(lib, placement, nets, tech);
  return r.run(design_id);
}

RouteResult route(const CellLibrary& lib, const Placement& placement, const std::vector<Net>& nets,
                  const RouterTech& tech, const std::string& design_id) {
  RouteResult res = route_unchecked(lib, placement, nets, tech, design_id);
  if (res.skip_fraction() > tech.max_skip_fraction) {
    std::ostringstream os;
    os << design_id << ": " << res.skipped.size() << " of " << res.net_count << " nets unroutable, above the "
       << tech.max_skip_fraction * 100.0 << "% limit";
    if (!res.skipped.empty()) os << " (first: " << res.skipped.front().net << ", " << res.skipped.front().reason << ")";
    throw RoutingError(os.str());
  }
  return res;
}

namespace {

struct NetShape {
  std::string layer;
  Rect rect;
};

std::vector<NetShape> pin_shapes(const RoutedDesign& d, const CellLibrary& lib, const NetTerminal& t) {
  std::vector<NetShape> out;
  const Instance* inst = d.placement.find_instance(t.instance);
  if (!inst) return out;
  const Pin* pin = lib.cell(inst->cell).find_pin(t.pin);
  if (!pin) return out;
  Transform tr = instance_transform(*inst, lib);
  for (const auto& [layer, s] : pin->shapes)
    for (const auto& r : s.rects()) out.push_back({layer, tr.apply(r)});
  return out;
}

}  // namespace

std::vector<std::string> check_connectivity(const RoutedDesign& d, const CellLibrary& lib) {
  std::vector<std::string> issues;
  for (const auto& net : d.nets) {
    auto it = d.routing.find(net.name);
    if (it == d.routing.end()) continue;
    std::vector<NetShape> shapes;
    for (const auto& t : net.terminals) {
      auto ps = pin_shapes(d, lib, t);
      if (ps.empty()) issues.push_back(net.name + ": terminal " + t.instance + ":" + t.pin + " not found");
      shapes.insert(shapes.end(), ps.begin(), ps.end());
    }
    for (const auto& [layer, s] : it->second.wires)
      for (const auto& r : s.rects()) shapes.push_back({layer, r});
    std::vector<std::array<std::size_t, 3>> via_items;
    for (const auto& v : it->second.vias) {
      if (!v.lower_enclosure.contains(v.cut) || !v.upper_enclosure.contains(v.cut))
        issues.push_back(net.name + ": via enclosure does not cover its cut at " + to_string(v.cut));
      std::size_t a = shapes.size();
      shapes.push_back({v.lower, v.lower_enclosure});
      shapes.push_back({v.cut_layer, v.cut});
      shapes.push_back({v.upper, v.upper_enclosure});
      via_items.push_back({a, a + 1, a + 2});
    }
    // Union-find over shapes: same-layer adjacency, plus each via ties its three parts.
    std::vector<std::size_t> parent(shapes.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
    std::map<std::string, std::vector<std::size_t>> by_layer;
    for (std::size_t i = 0; i < shapes.size(); ++i) by_layer[shapes[i].layer].push_back(i);
    for (const auto& [_, ids] : by_layer) {
      std::vector<Rect> rects;
      for (std::size_t i : ids) rects.push_back(shapes[i].rect);
      auto labels = label_components(rects);
      std::map<std::size_t, std::size_t> first;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        auto [pos, fresh] = first.emplace(labels[k], ids[k]);
        if (!fresh) unite(ids[k], pos->second);
      }
    }
    for (const auto& v : via_items) {
      unite(v[0], v[1]);
      unite(v[1], v[2]);
    }
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < shapes.size(); ++i) roots.insert(find(i));
    if (roots.size() > 1)
      issues.push_back(net.name + ": geometry splits into " + std::to_string(roots.size()) + " components");
  }
  return issues;
}

std::vector<std::string> check_shorts(const RoutedDesign& d, const CellLibrary& lib) {
  // Tags: net index * 2 + (1 if router-made); -1 for cell geometry outside any net.
  std::map<NetTerminal, std::int64_t> owner;
  for (std::size_t n = 0; n < d.nets.size(); ++n)
    for (const auto& t : d.nets[n].terminals) owner[t] = static_cast<std::int64_t>(n);
  std::map<std::string, RectIndex, std::less<>> index;
  Rect domain = d.placement.die.expanded(1000);
  Coord bin = bin_for(d.placement.die);
  auto layer_index = [&](const std::string& l) -> RectIndex& {
    auto it = index.find(l);
    if (it == index.end()) it = index.emplace(l, RectIndex(domain, bin)).first;
    return it->second;
  };
  for_each_static_shape(lib, d.placement, [&](const std::string& layer, const Rect& r, const Instance* inst, const Pin* pin) {
    std::int64_t tag = -1;
    if (pin) {
      auto it = owner.find(NetTerminal{inst->id, pin->name});
      if (it != owner.end()) tag = it->second * 2;
    }
    layer_index(layer).insert(r, tag);
  });
  std::vector<std::tuple<std::string, Rect, std::int64_t>> routed;
  for (std::size_t n = 0; n < d.nets.size(); ++n) {
    auto it = d.routing.find(d.nets[n].name);
    if (it == d.routing.end()) continue;
    std::int64_t tag = static_cast<std::int64_t>(n) * 2 + 1;
    for (const auto& [layer, s] : it->second.wires)
      for (const auto& r : s.rects()) routed.emplace_back(layer, r, tag);
    for (const auto& v : it->second.vias) {
      routed.emplace_back(v.lower, v.lower_enclosure, tag);
      routed.emplace_back(v.cut_layer, v.cut, tag);
      routed.emplace_back(v.upper, v.upper_enclosure, tag);
    }
  }
  for (const auto& [layer, r, tag] : routed) layer_index(layer).insert(r, tag);

  std::set<std::string> issues;
  auto net_of = [&](std::int64_t tag) { return tag < 0 ? std::string("<cell>") : d.nets[static_cast<std::size_t>(tag / 2)].name; };
  for (auto& [layer, idx] : index) {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      std::int64_t ta = idx.tag(a);
      const Rect& ra = idx.rect(a);
      idx.visit(ra, [&](std::size_t b, const Rect& rb) {
        if (b <= a || !ra.overlaps(rb)) return;
        std::int64_t tb = idx.tag(b);
        bool routed_a = ta >= 0 && ta % 2 == 1, routed_b = tb >= 0 && tb % 2 == 1;
        if (!routed_a && !routed_b) {
          // Cell-internal overlaps are library content; only distinct nets' pins count.
          if (ta < 0 || tb < 0 || ta == tb) return;
        }
        if (ta >= 0 && tb >= 0 && ta / 2 == tb / 2) return;
        issues.insert(layer + ": " + net_of(ta) + " overlaps " + net_of(tb) + " at " + to_string(*ra.intersection(rb)));
      });
    }
  }
  return {issues.begin(), issues.end()};
}

}  // namespace lithocheck
