#include <doctest.h>

#include <random>

#include "lithocheck/geometry.hpp"
#include "oracle.hpp"

using namespace lithocheck;

namespace {

constexpr BoolOp kOps[] = {BoolOp::And, BoolOp::Or, BoolOp::Xor, BoolOp::Diff};

oracle::Bitmap grid_of(const RectSet& s, Coord n = 64) { return oracle::raster(s.rects(), 0, 0, n, n); }

bool pairwise_disjoint(const RectSet& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (s.rects()[i].overlaps(s.rects()[j])) return false;
  return true;
}

}  // namespace

TEST_CASE("canonicalize basics") {
  CHECK(canonicalize(RectSet{}).empty());
  RectSet s{{0, 0, 10, 10}, {5, 0, 15, 10}};
  CHECK(canonicalize(s).rects() == std::vector<Rect>{{0, 0, 15, 10}});
  CHECK_THROWS_AS(RectSet({{0, 0, 0, 5}}), std::invalid_argument);
}

TEST_CASE("canonicalize matches raster on random input") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    RectSet raw(oracle::random_rects(rng, 50, 0, 0, 64, 64, 20));
    RectSet c = canonicalize(raw);
    CHECK(c.canonical());
    CHECK(pairwise_disjoint(c));
    CHECK(grid_of(c) == grid_of(raw));
    CHECK(canonicalize(c).rects() == c.rects());
    CHECK(std::is_sorted(c.rects().begin(), c.rects().end(),
                         [](const Rect& a, const Rect& b) { return std::tie(a.y_lo, a.x_lo) < std::tie(b.y_lo, b.x_lo); }));
  }
}

TEST_CASE("canonical form is unique per point set") {
  // Same region described two different ways.
  RectSet a{{0, 0, 10, 4}, {0, 4, 4, 10}};
  RectSet b{{0, 0, 4, 10}, {4, 0, 10, 4}};
  CHECK(canonicalize(a).rects() == canonicalize(b).rects());
  // Vertically stacked equal spans merge into one slab.
  CHECK(canonicalize(RectSet{{0, 0, 5, 3}, {0, 3, 5, 8}}).rects() == std::vector<Rect>{{0, 0, 5, 8}});
}

TEST_CASE("boolean ops") {
  RectSet a{{0, 0, 10, 10}};
  CHECK((a ^ a).empty());
  CHECK((a - RectSet{{0, 0, 10, 5}}).rects() == std::vector<Rect>{{0, 5, 10, 10}});

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Coord n = trial % 2 ? 64 : 128;
    RectSet x(oracle::random_rects(rng, 1 + trial % 30, 0, 0, n, n, 30));
    RectSet y(oracle::random_rects(rng, 1 + trial % 17, 0, 0, n, n, 30));
    for (BoolOp op : kOps) {
      RectSet r = boolean(x, y, op);
      CHECK(r.canonical());
      CHECK(pairwise_disjoint(r));
      CHECK(grid_of(r, n) == oracle::combine(grid_of(x, n), grid_of(y, n), op));
    }
    CHECK((x | y) == (y | x));
    CHECK((x & y) == (y & x));
    CHECK((x ^ y) == ((x | y) - (x & y)));
    CHECK((x | y).area() + (x & y).area() == x.area() + y.area());
    CHECK(subset_of(x & y, x));
  }
}

TEST_CASE("transforms") {
  RectSet s{{0, 0, 4, 2}};
  CHECK(apply_transform(s, {Orientation::N, 0, 0}) == s);
  CHECK(apply_transform(s, {Orientation::FN, 0, 0}).rects() == std::vector<Rect>{{-4, 0, 0, 2}});
  CHECK(apply_transform(s, {Orientation::FS, 0, 0}).rects() == std::vector<Rect>{{0, -2, 4, 0}});
  CHECK(apply_transform(s, {Orientation::S, 0, 0}).rects() == std::vector<Rect>{{-4, -2, 0, 0}});

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    RectSet x = canonicalize(RectSet(oracle::random_rects(rng, 10, -20, -20, 64, 64, 15)));
    Transform t{kAllOrientations[trial % 4], std::uniform_int_distribution<Coord>(-50, 50)(rng),
                std::uniform_int_distribution<Coord>(-50, 50)(rng)};
    RectSet y = apply_transform(x, t);
    CHECK(y.area() == x.area());
    CHECK(apply_transform(y, t.inverse()).rects() == x.rects());
    Transform u{kAllOrientations[(trial / 4) % 4], 3, -7};
    CHECK(apply_transform(y, u) == apply_transform(x, u.compose(t)));
  }
}

TEST_CASE("placing keeps the box in place") {
  for (auto o : kAllOrientations) {
    Transform t = Transform::placing(o, 100, 200, 30, 40);
    CHECK(t.apply(Rect{0, 0, 30, 40}) == Rect{100, 200, 130, 240});
  }
}

TEST_CASE("clip") {
  CHECK(clip(RectSet{{0, 0, 20, 10}}, {5, 0, 15, 10}).rects() == std::vector<Rect>{{5, 0, 15, 10}});
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    RectSet x(oracle::random_rects(rng, 20, 0, 0, 64, 64, 20));
    Rect w = oracle::random_rects(rng, 1, 0, 0, 64, 64, 40).front();
    RectSet c = clip(x, w);
    CHECK(subset_of(c, RectSet{w}));
    CHECK(grid_of(c) == oracle::combine(grid_of(x), grid_of(RectSet{w}), BoolOp::And));
  }
}

TEST_CASE("connected components use edge adjacency") {
  // Corner contact only: two components.
  CHECK(connected_components(RectSet{{0, 0, 2, 2}, {2, 2, 4, 4}}).size() == 2);
  // Shared edge: one.
  CHECK(connected_components(RectSet{{0, 0, 2, 2}, {2, 0, 4, 1}}).size() == 1);
  CHECK(label_components(std::vector<Rect>{{0, 0, 2, 2}, {5, 5, 6, 6}, {2, 1, 3, 3}}) ==
        std::vector<std::size_t>{0, 1, 0});

  // Flood-fill oracle over unit cells.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    RectSet x = canonicalize(RectSet(oracle::random_rects(rng, 12, 0, 0, 32, 32, 8)));
    auto grid = grid_of(x, 32);
    std::vector<int> label(32 * 32, -1);
    int n = 0;
    for (int s = 0; s < 32 * 32; ++s) {
      if (!grid.bits[s] || label[s] >= 0) continue;
      std::vector<int> stack{s};
      label[s] = n;
      while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        int cx = c % 32, cy = c / 32;
        const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto [dx, dy] : nb) {
          int nx = cx + dx, ny = cy + dy;
          if (nx < 0 || ny < 0 || nx >= 32 || ny >= 32) continue;
          int k = ny * 32 + nx;
          if (grid.bits[k] && label[k] < 0) {
            label[k] = n;
            stack.push_back(k);
          }
        }
      }
      ++n;
    }
    auto comps = connected_components(x);
    CHECK(comps.size() == static_cast<std::size_t>(n));
    RectSet all;
    for (const auto& c : comps) all = all | c;
    CHECK(all == x);
  }
}
