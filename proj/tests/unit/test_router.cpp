#include <doctest.h>

#include "fixture_data.hpp"
#include "lithocheck/scenarios.hpp"
#include "lithocheck/text_format.hpp"

using namespace lithocheck;

namespace {

Placement two_inverters() {
  Placement p;
  p.name = "pair";
  p.die = {0, 0, 800, 720};
  p.rows = {{0, Orientation::N}, {360, Orientation::FS}};
  p.instances = {{"i0", "INV", Orientation::N, 40, 0}, {"i1", "INV", Orientation::FS, 480, 360}};
  return p;
}

}  // namespace

TEST_CASE("tech parse and round trip") {
  auto lib = fixtures::library("clean");
  auto tech = fixtures::tech(lib);
  REQUIRE(tech.tracks.size() == 2);
  CHECK(tech.tracks[0].layer == "M2");
  CHECK(tech.tracks[1].direction == RoutingDirection::Vertical);
  CHECK(tech.effective_spacing() == 20);
  CHECK(tech.via_penalty == 3);
  CHECK(tech.max_skip_fraction == doctest::Approx(0.05));
  REQUIRE(tech.via_between("M1", "M2"));
  CHECK(tech.via_between("M1", "M2")->lower_enclosure == 5);
  CHECK_FALSE(tech.via_between("M1", "M3"));
  CHECK(parse_tech(serialize_tech(tech), lib) == tech);
  CHECK_THROWS_AS(parse_tech("TRACKS M7 PITCH 40 OFFSET 20 DIR h WIDTH 20\n", lib), ParseError);
  CHECK_THROWS_AS(parse_tech("TRACKS M2 PITCH 0 OFFSET 20 DIR h WIDTH 20\n", lib), ParseError);
  CHECK_THROWS_AS(parse_tech("VIA M1/M3 CUT 20 20 ENC 0 0\n", lib), ParseError);
}

TEST_CASE("grid follows the tracks") {
  auto lib = fixtures::library("clean");
  auto p = two_inverters();
  RoutingGrid grid(lib, p, fixtures::tech(lib));
  REQUIRE_FALSE(grid.xs().empty());
  CHECK(grid.xs().front() == 20);
  CHECK(grid.xs().back() == 780);
  CHECK(grid.ys().front() == 20);
  CHECK(grid.ys().back() == 700);
  for (auto x : grid.xs()) CHECK((x - 20) % 40 == 0);
  CHECK(grid.layer_count() == 2);
  CHECK(grid.blocked_count() < grid.xs().size() * grid.ys().size() * 2);
}

TEST_CASE("two pin net routes and checks clean") {
  auto lib = fixtures::library("clean");
  auto p = two_inverters();
  std::vector<Net> nets = {{"n1", {{"i0", "Z"}, {"i1", "A"}}}};
  auto r = route(lib, p, nets, fixtures::tech(lib), "pair");
  CHECK(r.skipped.empty());
  CHECK(r.net_count == 1);
  REQUIRE(r.design.routing.contains("n1"));
  const auto& nr = r.design.routing.at("n1");
  CHECK_FALSE(nr.vias.empty());
  CHECK(check_connectivity(r.design, lib).empty());
  CHECK(check_shorts(r.design, lib).empty());
  CHECK(parse_routed_design(serialize_routed_design(r.design), lib) == r.design);

  SUBCASE("missing wires break connectivity") {
    auto d = r.design;
    d.routing.at("n1").wires.clear();
    CHECK_FALSE(check_connectivity(d, lib).empty());
  }
  SUBCASE("wire touching a foreign pin is a short") {
    auto d = r.design;
    // Z pin of i1 sits at x 605..635 after placement; drop a V1/M2 stack on it.
    Rect pin = instance_transform(*p.find_instance("i1"), lib).apply(Rect{125, 85, 155, 275});
    Rect cut{pin.x_lo + 5, pin.y_lo + 20, pin.x_lo + 25, pin.y_lo + 40};
    d.routing.at("n1").vias.push_back({"M1", "M2", "V1", cut, cut.expanded(5), cut.expanded(5)});
    CHECK_FALSE(check_shorts(d, lib).empty());
  }
}

TEST_CASE("generated design routes soundly and deterministically") {
  auto lib = fixtures::library("clean");
  ScenarioConfig cfg;
  cfg.n = 12;
  cfg.clearance = 240;
  auto nl = gen_netlist(lib, cfg);
  auto p = gen_autoplace(lib, nl, cfg);
  auto tech = fixtures::tech(lib);
  auto r = route(lib, p, nl.nets, tech, "gen");
  CHECK(r.net_count == nl.nets.size());
  CHECK(r.skip_fraction() <= tech.max_skip_fraction);
  CHECK(r.design.routing.size() + r.skipped.size() == nl.nets.size());
  CHECK(check_connectivity(r.design, lib).empty());
  CHECK(check_shorts(r.design, lib).empty());
  CHECK(route(lib, p, nl.nets, tech, "gen").design == r.design);
}

TEST_CASE("skip limit raises") {
  auto lib = fixtures::library("clean");
  auto p = two_inverters();
  auto tech = fixtures::tech(lib);
  // An enclosure wider than any pin bar leaves no access point.
  tech.vias[0].lower_enclosure = 40;
  tech.max_skip_fraction = 0.0;
  std::vector<Net> nets = {{"n1", {{"i0", "Z"}, {"i1", "A"}}}};
  auto loose = route_unchecked(lib, p, nets, tech, "pair");
  REQUIRE(loose.skipped.size() == 1);
  CHECK(loose.skipped[0].net == "n1");
  CHECK_THROWS_AS(route(lib, p, nets, tech, "pair"), RoutingError);
}
