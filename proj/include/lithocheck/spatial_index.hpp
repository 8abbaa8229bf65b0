#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "lithocheck/geometry.hpp"

namespace lithocheck {

// Uniform-bin index over a growable list of rects. Queries are const and
// report each rect at most once without per-query scratch state, so a
// finished index can be shared between threads.
class RectIndex {
 public:
  RectIndex() = default;
  RectIndex(Rect domain, Coord bin_size) { reset(domain, bin_size); }

  void reset(Rect domain, Coord bin_size) {
    domain_ = domain;
    bin_ = std::max<Coord>(bin_size, 1);
    nx_ = std::max<Coord>(1, (domain.width() + bin_ - 1) / bin_);
    ny_ = std::max<Coord>(1, (domain.height() + bin_ - 1) / bin_);
    bins_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    rects_.clear();
    tags_.clear();
  }

  std::size_t insert(const Rect& r, std::int64_t tag = 0) {
    auto id = static_cast<std::uint32_t>(rects_.size());
    rects_.push_back(r);
    tags_.push_back(tag);
    auto [bx0, by0, bx1, by1] = bin_range(r);
    for (Coord by = by0; by <= by1; ++by)
      for (Coord bx = bx0; bx <= bx1; ++bx) bins_[static_cast<std::size_t>(by * nx_ + bx)].push_back(id);
    return id;
  }

  const Rect& rect(std::size_t id) const { return rects_[id]; }
  std::int64_t tag(std::size_t id) const { return tags_[id]; }
  std::size_t size() const { return rects_.size(); }

  // Visits every rect whose closed box touches the closed query box.
  template <typename Fn>
  void visit(const Rect& q, Fn&& fn) const {
    if (rects_.empty()) return;
    auto [qx0, qy0, qx1, qy1] = bin_range(q);
    for (Coord by = qy0; by <= qy1; ++by) {
      for (Coord bx = qx0; bx <= qx1; ++bx) {
        for (std::uint32_t id : bins_[static_cast<std::size_t>(by * nx_ + bx)]) {
          const Rect& r = rects_[id];
          if (!r.touches(q)) continue;
          // Report only from the first bin shared by the rect and the query.
          auto [rx0, ry0, rx1, ry1] = bin_range(r);
          if (bx != std::max(rx0, qx0) || by != std::max(ry0, qy0)) continue;
          fn(id, r);
        }
      }
    }
  }

  bool any_overlap(const Rect& q) const {
    bool hit = false;
    visit(q, [&](std::size_t, const Rect& r) { hit = hit || r.overlaps(q); });
    return hit;
  }

 private:
  struct BinRange {
    Coord x0, y0, x1, y1;
  };
  BinRange bin_range(const Rect& r) const {
    auto clamp_x = [&](Coord v) { return std::clamp<Coord>(floor_div(v - domain_.x_lo, bin_), 0, nx_ - 1); };
    auto clamp_y = [&](Coord v) { return std::clamp<Coord>(floor_div(v - domain_.y_lo, bin_), 0, ny_ - 1); };
    return {clamp_x(r.x_lo), clamp_y(r.y_lo), clamp_x(r.x_hi), clamp_y(r.y_hi)};
  }
  static Coord floor_div(Coord a, Coord b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

  Rect domain_{0, 0, 1, 1};
  Coord bin_ = 1;
  Coord nx_ = 1;
  Coord ny_ = 1;
  std::vector<std::vector<std::uint32_t>> bins_;
  std::vector<Rect> rects_;
  std::vector<std::int64_t> tags_;
};

}  // namespace lithocheck
