#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "lithocheck/flow.hpp"

namespace lithocheck {

// Machine-readable summary of a run. Keys are sorted and nothing depends on
// wall-clock time or file locations, so equal runs give equal bytes.
nlohmann::json build_summary(const RunResults& results);

std::string summary_text(const nlohmann::json& summary);

// Every report file keyed by its path relative to the report directory,
// rendered from the summary alone.
std::map<std::string, std::string> render_report(const nlohmann::json& summary);

void write_report(const std::map<std::string, std::string>& files, const std::filesystem::path& dir);

// 0 when nothing was found, 1 otherwise.
int findings_status(const nlohmann::json& summary);

}  // namespace lithocheck
