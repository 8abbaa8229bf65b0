#pragma once

// Paths and loaders for the files under tests/fixtures.

#include <string>

#include "lithocheck/flow.hpp"
#include "lithocheck/layout.hpp"
#include "lithocheck/pattern.hpp"
#include "lithocheck/router.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

inline lithocheck::CellLibrary library(const std::string& name) {
  return lithocheck::parse_library(lithocheck::read_file(path(name + ".lib")), path(name + ".lib"));
}

inline lithocheck::PatternDeck deck() { return lithocheck::parse_deck(lithocheck::read_file(path("deck.txt")), path("deck.txt")); }

inline lithocheck::RouterTech tech(const lithocheck::CellLibrary& lib) {
  return lithocheck::parse_tech(lithocheck::read_file(path("tech.txt")), lib, path("tech.txt"));
}

inline lithocheck::RunConfig run_config(const std::string& lib, std::set<lithocheck::ScenarioKind> scenarios) {
  lithocheck::RunConfig cfg;
  cfg.library = path(lib + ".lib");
  cfg.deck = path("deck.txt");
  cfg.tech = path("tech.txt");
  cfg.scenarios = std::move(scenarios);
  return cfg;
}

}  // namespace fixtures
