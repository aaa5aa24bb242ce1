#pragma once

#include <cstdint>
#include <span>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlcz/counts.hpp"
#include "dlcz/decoherence.hpp"
#include "dlcz/mc_engine.hpp"

namespace dlcz {

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// `# key: value` lines written above every CSV header.
struct Provenance {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;

  std::string comment_block() const;
};

inline constexpr std::string_view kCountsHeader =
    "t_seconds,theta_s_deg,theta_as_deg,n_pulses,n_d1,n_d2,c13,c24,c14,c23";

/// One header line and one row per table.
std::string format_counts_csv(std::span<const CountsTable> tables, const Provenance& prov);

/// Columns are matched by header name, in any order; extra columns are
/// ignored. Missing columns, bad cells and inconsistent counts raise
/// SchemaError naming the column.
std::vector<CountsTable> parse_counts_csv(std::string_view text, std::string_view origin);

/// Two or three columns: t_seconds, R, optional sigma. A first line that does
/// not parse as numbers is taken as the header.
std::vector<DecaySample> parse_decay_csv(std::string_view text, std::string_view origin);

std::string format_records_csv(std::span<const TrialRecord> records, const AngleSettings& angles,
                               const Provenance& prov);

std::string read_text_file(const std::filesystem::path& path);
/// Writes the whole buffer or throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace dlcz
