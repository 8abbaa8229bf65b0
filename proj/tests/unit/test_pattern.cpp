#include <doctest.h>

#include "fixture_data.hpp"
#include "lithocheck/text_format.hpp"

using namespace lithocheck;

namespace {

std::size_t polygons(const LayerShapes& s) {
  std::size_t n = 0;
  for (const auto& [_, r] : s) n += connected_components(r).size();
  return n;
}

}  // namespace

TEST_CASE("deck parse and round trip") {
  auto deck = fixtures::deck();
  CHECK(deck.name == "litho");
  CHECK(deck.process == "n28");
  CHECK(deck.margin == 0);
  REQUIRE(deck.patterns.size() == 3);
  CHECK(deck.type_ids() == std::vector<int>{1, 2, 3});
  CHECK(deck.max_extent_dimension() == 240);
  CHECK(parse_deck(serialize_deck(deck)) == deck);
}

TEST_CASE("one partial per removable polygon") {
  auto deck = fixtures::deck();
  CHECK(generate_partials(*deck.find("WP1")).size() == 5);
  CHECK(generate_partials(*deck.find("WP2")).size() == 4);
  CHECK(generate_partials(*deck.find("WP3")).size() == 3);
  for (const auto& p : deck.patterns) {
    auto parts = generate_partials(p);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      CAPTURE(parts[k].id);
      CHECK(parts[k].id == p.id + ".p" + std::to_string(k + 1));
      CHECK(polygons(parts[k].solids) + 1 == polygons(p.solids));
      const auto& removed = parts[k].removed;
      CHECK((parts[k].solids.at(removed.layer) & RectSet{removed.bbox}).empty());
      CHECK(subset_of(RectSet{removed.bbox}, parts[k].dontcare.at(removed.layer)));
    }
  }
}

TEST_CASE("deletion-only partials add no don't-care") {
  auto deck = fixtures::deck();
  const auto& wp2 = *deck.find("WP2");
  for (const auto& p : generate_partials(wp2, 0, PartialMode::DeletionOnly)) {
    CHECK(p.dontcare == wp2.dontcare);
  }
}

TEST_CASE("margin grows the don't-care region inside the extent") {
  WeakpointPattern p;
  p.id = "M";
  p.extent = {0, 0, 20, 20};
  p.solids["M1"] = RectSet{{0, 0, 4, 4}, {10, 10, 14, 14}};
  p.removable = {{"M1", 0}};
  auto parts = generate_partials(p, 3);
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].dontcare.at("M1") == RectSet{{0, 0, 7, 7}});
  CHECK(parts[0].solids.at("M1") == RectSet{{10, 10, 14, 14}});
}

TEST_CASE("removable subsets and deck errors") {
  const char* text = R"(DECK d MARGIN 2
PATTERN A TYPE 4 EXTENT 10 10
  SOLID M1 0 0 2 2
  SOLID M1 5 5 7 7
  REMOVABLE M1 1
END PATTERN
END DECK
)";
  auto deck = parse_deck(text);
  CHECK(deck.margin == 2);
  CHECK(generate_partials(deck.patterns[0], deck.margin).size() == 1);
  std::string outside = text;
  outside.replace(outside.find("5 5 7 7"), 7, "5 5 7 17");
  CHECK_THROWS_AS(parse_deck(outside), ParseError);
  std::string missing = text;
  missing.replace(missing.find("REMOVABLE M1 1"), 14, "REMOVABLE M1 7");
  CHECK_THROWS_AS(parse_deck(missing), ParseError);
  CHECK_THROWS_AS(parse_deck("DECK d\nPATTERN A TYPE 1 EXTENT 4 4\nEND PATTERN\nEND DECK\n"), ParseError);
}
