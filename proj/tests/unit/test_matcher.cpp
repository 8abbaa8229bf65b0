#include <doctest.h>

#include "lithocheck/matcher.hpp"
#include "lithocheck/task_pool.hpp"
#include "random_cases.hpp"

using namespace lithocheck;

namespace {

const std::vector<Orientation> kAll(std::begin(kAllOrientations), std::end(kAllOrientations));

FlatLayout flat(Rect die, std::map<std::string, RectSet, std::less<>> layers) { return {die, std::move(layers)}; }

}  // namespace

TEST_CASE("corner masks") {
  CHECK_FALSE(is_corner_mask(0));
  CHECK_FALSE(is_corner_mask(15));
  CHECK_FALSE(is_corner_mask(0b0011));
  CHECK(is_corner_mask(0b0001));
  CHECK(is_corner_mask(0b0101));
  CHECK(is_corner_mask(0b0111));

  LayoutIndex idx(flat({0, 0, 20, 20}, {{"M1", RectSet{{2, 2, 6, 6}}}}));
  CHECK(idx.mask_at("M1", {2, 2}) == 0b0001);
  CHECK(idx.mask_at("M1", {6, 6}) == 0b0100);
  CHECK(idx.corners("M1", 0b0001) == std::vector<Point>{{2, 2}});
}

TEST_CASE("empty layout has no markers") {
  LayoutIndex idx(flat({0, 0, 50, 50}, {{"M1", RectSet{}}}));
  MatchPattern p{"A", 1, MatchKind::Full, {0, 0, 10, 10}, {{"M1", RectSet{{2, 2, 4, 8}}}}, {}};
  CHECK(match_pattern(idx, p).empty());
}

TEST_CASE("unknown layer is rejected") {
  LayoutIndex idx(flat({0, 0, 50, 50}, {{"M1", RectSet{}}}));
  MatchPattern p{"A", 1, MatchKind::Full, {0, 0, 10, 10}, {{"M2", RectSet{{2, 2, 4, 8}}}}, {}};
  CHECK_THROWS_AS(match_pattern(idx, p), std::invalid_argument);
}

TEST_CASE("exact match finds each occurrence and orientation") {
  // An L shape; its mirror images are distinct so each orientation hits once.
  RectSet l{{0, 0, 6, 2}, {0, 2, 2, 6}};
  RectSet layout = translate(l, 10, 10) | apply_transform(l, Transform::placing(Orientation::S, 30, 30, 6, 6));
  LayoutIndex idx(flat({0, 0, 60, 60}, {{"M1", layout}}));
  MatchPattern p{"L", 2, MatchKind::Full, {0, 0, 8, 8}, {{"M1", translate(l, 1, 1)}}, {}};
  auto m = match_pattern(idx, p);
  REQUIRE(m.size() == 2);
  CHECK(m[0].rect == Rect{9, 9, 17, 17});
  CHECK(m[0].orient == Orientation::N);
  CHECK(m[1].rect == Rect{29, 29, 37, 37});
  CHECK(m[1].orient == Orientation::S);
}

TEST_CASE("matches equal the sweep oracle") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    CAPTURE(seed);
    auto c = cases::random_case(seed);
    LayoutIndex idx(c.layout);
    auto ol = cases::to_oracle(c.layout);
    auto full = to_match_pattern(c.pattern);
    CHECK(match_pattern(idx, full) == oracle::sweep_match(ol, cases::to_oracle(full), kAll));
    for (auto mode : {PartialMode::DontCare, PartialMode::DeletionOnly}) {
      for (const auto& part : generate_partials(c.pattern, static_cast<Coord>(seed % 3), mode)) {
        auto mp = to_match_pattern(part);
        CHECK(match_pattern(idx, mp) == oracle::sweep_match(ol, cases::to_oracle(mp), kAll));
      }
    }
  }
}

TEST_CASE("translation equivariance") {
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    auto c = cases::random_case(seed);
    auto moved = c.layout;
    moved.die = moved.die.translated(17, -5);
    for (auto& [_, s] : moved.layers) s = translate(s, 17, -5);
    auto p = to_match_pattern(c.pattern);
    auto a = match_pattern(LayoutIndex(c.layout), p);
    auto b = match_pattern(LayoutIndex(moved), p);
    for (auto& m : a) m.rect = m.rect.translated(17, -5);
    CHECK(a == b);
  }
}

TEST_CASE("orientation soundness") {
  for (std::uint64_t seed = 400; seed < 430; ++seed) {
    auto c = cases::random_case(seed);
    auto p = to_match_pattern(c.pattern);
    auto base = match_pattern(LayoutIndex(c.layout), p);
    for (auto o : kAllOrientations) {
      Transform t = Transform::placing(o, c.layout.die.x_lo, c.layout.die.y_lo, c.layout.die.width(),
                                       c.layout.die.height());
      t = t.compose(Transform{Orientation::N, -c.layout.die.x_lo, -c.layout.die.y_lo});
      FlatLayout moved{t.apply(c.layout.die), {}};
      for (const auto& [l, s] : c.layout.layers) moved.layers[l] = apply_transform(s, t);
      std::vector<Marker> expect;
      for (auto m : base) {
        m.rect = t.apply(m.rect);
        m.orient = compose(o, m.orient);
        expect.push_back(m);
      }
      sort_markers(expect);
      CHECK(match_pattern(LayoutIndex(moved), p) == expect);
    }
  }
}

TEST_CASE("match_deck is independent of worker count") {
  PatternDeck deck;
  deck.name = "d";
  for (std::uint64_t seed = 500; seed < 506; ++seed) {
    auto c = cases::random_case(seed);
    c.pattern.id = "P" + std::to_string(seed);
    deck.patterns.push_back(c.pattern);
  }
  auto c = cases::random_case(500);
  for (const char* l : {"M1", "M2", "V1"}) c.layout.layers.try_emplace(l);
  LayoutIndex idx(c.layout);
  DeckMatchOptions opt;
  auto serial = match_deck(idx, deck, opt);
  TaskPool pool(4);
  opt.pool = &pool;
  CHECK(match_deck(idx, deck, opt) == serial);
  CHECK(parse_markers(serialize_markers(serial)) == serial);
}
