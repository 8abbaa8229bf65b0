#pragma once

// Brute-force reference implementations used by the tests. They rasterize
// everything onto unit cells and share no code with the library beyond the
// plain Rect/Marker structs.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lithocheck/geometry.hpp"
#include "lithocheck/matcher.hpp"

namespace oracle {

using lithocheck::Coord;
using lithocheck::Rect;

struct Bitmap {
  Coord x0 = 0, y0 = 0, w = 0, h = 0;
  std::vector<char> bits;

  Bitmap(Coord x0_, Coord y0_, Coord w_, Coord h_) : x0(x0_), y0(y0_), w(w_), h(h_), bits(w_ * h_, 0) {}

  bool get(Coord x, Coord y) const {
    if (x < x0 || y < y0 || x >= x0 + w || y >= y0 + h) return false;
    return bits[(y - y0) * w + (x - x0)] != 0;
  }
  void set(Coord x, Coord y, bool v = true) {
    if (x < x0 || y < y0 || x >= x0 + w || y >= y0 + h) return;
    bits[(y - y0) * w + (x - x0)] = v;
  }
  void paint(const Rect& r) {
    for (Coord y = r.y_lo; y < r.y_hi; ++y)
      for (Coord x = r.x_lo; x < r.x_hi; ++x) set(x, y);
  }
  void paint(const std::vector<Rect>& rs) {
    for (const auto& r : rs) paint(r);
  }
  Coord count() const { return std::count(bits.begin(), bits.end(), 1); }
  bool operator==(const Bitmap&) const = default;
};

inline Bitmap raster(const std::vector<Rect>& rs, Coord x0, Coord y0, Coord w, Coord h) {
  Bitmap b(x0, y0, w, h);
  b.paint(rs);
  return b;
}

inline Bitmap combine(const Bitmap& a, const Bitmap& b, lithocheck::BoolOp op) {
  Bitmap out(a.x0, a.y0, a.w, a.h);
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    bool p = a.bits[i], q = b.bits[i], v = false;
    switch (op) {
      case lithocheck::BoolOp::And: v = p && q; break;
      case lithocheck::BoolOp::Or: v = p || q; break;
      case lithocheck::BoolOp::Xor: v = p != q; break;
      case lithocheck::BoolOp::Diff: v = p && !q; break;
    }
    out.bits[i] = v;
  }
  return out;
}

struct Layout {
  Rect die;
  std::map<std::string, std::vector<Rect>> layers;
};

struct Pattern {
  std::string id;
  int type_id = 1;
  lithocheck::MatchKind kind = lithocheck::MatchKind::Full;
  Coord w = 0, h = 0;
  std::map<std::string, std::vector<Rect>> solids;
  std::map<std::string, std::vector<Rect>> dontcare;
};

// Every translation with the window inside the die, every orientation,
// every cell of the extent compared.
inline std::vector<lithocheck::Marker> sweep_match(const Layout& layout, const Pattern& p,
                                                   const std::vector<lithocheck::Orientation>& orients) {
  std::set<std::string> names;
  for (const auto& [l, _] : p.solids) names.insert(l);
  for (const auto& [l, _] : p.dontcare) names.insert(l);
  struct LayerBits {
    Bitmap layout, solid, dc;
  };
  std::vector<LayerBits> layers;
  const Rect& d = layout.die;
  for (const auto& l : names) {
    auto lit = layout.layers.find(l);
    auto sit = p.solids.find(l);
    auto dit = p.dontcare.find(l);
    layers.push_back({raster(lit == layout.layers.end() ? std::vector<Rect>{} : lit->second, d.x_lo, d.y_lo,
                             d.width(), d.height()),
                      raster(sit == p.solids.end() ? std::vector<Rect>{} : sit->second, 0, 0, p.w, p.h),
                      raster(dit == p.dontcare.end() ? std::vector<Rect>{} : dit->second, 0, 0, p.w, p.h)});
  }
  std::vector<lithocheck::Marker> out;
  for (auto o : orients) {
    bool fx = lithocheck::flips_x(o), fy = lithocheck::flips_y(o);
    for (Coord ty = d.y_lo; ty + p.h <= d.y_hi; ++ty) {
      for (Coord tx = d.x_lo; tx + p.w <= d.x_hi; ++tx) {
        bool ok = true;
        for (const auto& lb : layers) {
          for (Coord v = 0; ok && v < p.h; ++v) {
            for (Coord u = 0; ok && u < p.w; ++u) {
              Coord su = fx ? p.w - 1 - u : u, sv = fy ? p.h - 1 - v : v;
              if (lb.dc.get(su, sv)) continue;
              ok = lb.layout.get(tx + u, ty + v) == lb.solid.get(su, sv);
            }
          }
          if (!ok) break;
        }
        if (ok) out.push_back({{tx, ty, tx + p.w, ty + p.h}, p.id, p.type_id, o, p.kind});
      }
    }
  }
  lithocheck::sort_markers(out);
  return out;
}

inline std::vector<Rect> random_rects(std::mt19937_64& rng, int count, Coord x0, Coord y0, Coord w, Coord h,
                                      Coord max_side) {
  std::vector<Rect> out;
  for (int i = 0; i < count; ++i) {
    Coord rw = std::uniform_int_distribution<Coord>(1, std::min(max_side, w))(rng);
    Coord rh = std::uniform_int_distribution<Coord>(1, std::min(max_side, h))(rng);
    Coord x = std::uniform_int_distribution<Coord>(x0, x0 + w - rw)(rng);
    Coord y = std::uniform_int_distribution<Coord>(y0, y0 + h - rh)(rng);
    out.push_back({x, y, x + rw, y + rh});
  }
  return out;
}

}  // namespace oracle
