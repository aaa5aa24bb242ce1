#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "dlcz/estimators.hpp"
#include "dlcz/mc_engine.hpp"
#include "dlcz/params.hpp"
#include "dlcz/repeater.hpp"

namespace dlcz {

/// Everything a run can be configured with. Keys missing from a file keep
/// the defaults below (the as-built experiment).
struct Config {
  ExperimentParams experiment;
  DetectionChain chain;
  std::optional<LossBudget> losses;
  EnsembleGeometry geometry;
  CycleTiming timing;
  BellSettings bell;
  RepeaterParams repeater;
  bool double_pair = false;

  bool operator==(const Config&) const = default;
};

/// Parses flat `section.key = value` text. Blank lines and `#` comments are
/// ignored; `losses.<name>` entries build an itemised loss budget; every
/// other key must be known. Errors are ConfigError with "<origin>:<line>".
Config parse_config(std::string_view text, std::string_view origin = "<config>");

/// Reads and parses a file. Missing or unreadable files raise IoError.
Config load_config(const std::filesystem::path& path);

/// Stable `key = value` dump of every setting, sorted by key, with doubles in
/// shortest round-trip form. parse_config(canonical_dump(c)) == c.
std::string canonical_dump(const Config& config);

}  // namespace dlcz
