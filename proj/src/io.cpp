#include "dlcz/io.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "dlcz/errors.hpp"

namespace dlcz {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string Provenance::comment_block() const {
  std::string out = fmt::format("# command: {}\n# config_hash: {}\n# seed: {}\n", command,
                                config_hash, seed);
  for (const auto& [k, v] : extra) out += fmt::format("# {}: {}\n", k, v);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? line.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// Non-empty lines that are not comments, with 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> data_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(no, line);
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

std::optional<std::uint64_t> to_count(std::string_view s) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

}  // namespace

std::string format_counts_csv(std::span<const CountsTable> tables, const Provenance& prov) {
  std::string out = prov.comment_block();
  out += kCountsHeader;
  out += '\n';
  for (const auto& t : tables) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", t.storage_time,
                       degrees(t.settings.theta_s), degrees(t.settings.theta_as), t.n_pulses,
                       t.n_d1, t.n_d2, t.c13, t.c24, t.c14, t.c23);
  }
  return out;
}

std::vector<CountsTable> parse_counts_csv(std::string_view text, std::string_view origin) {
  const auto lines = data_lines(text);
  if (lines.empty()) throw SchemaError(fmt::format("{}: no header line", origin));

  const auto header = split(lines.front().second);
  const auto wanted = split(kCountsHeader);
  std::vector<std::size_t> index;
  for (const auto name : wanted) {
    std::size_t found = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        if (found != header.size()) {
          throw SchemaError(fmt::format("{}: column '{}' appears twice", origin, name));
        }
        found = i;
      }
    }
    if (found == header.size()) {
      throw SchemaError(fmt::format("{}: missing column '{}'", origin, name));
    }
    index.push_back(found);
  }

  std::vector<CountsTable> tables;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto [line_no, line] = lines[r];
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw SchemaError(fmt::format("{}:{}: expected {} cells, found {}", origin, line_no,
                                    header.size(), cells.size()));
    }
    const auto cell = [&](std::size_t k) { return cells[index[k]]; };
    const auto real = [&](std::size_t k) {
      const auto v = to_double(cell(k));
      if (!v) {
        throw SchemaError(fmt::format("{}:{}: column '{}': '{}' is not a number", origin, line_no,
                                      wanted[k], cell(k)));
      }
      return *v;
    };
    const auto count = [&](std::size_t k) {
      const auto v = to_count(cell(k));
      if (!v) {
        throw SchemaError(fmt::format("{}:{}: column '{}': '{}' is not a non-negative integer",
                                      origin, line_no, wanted[k], cell(k)));
      }
      return *v;
    };

    CountsTable t;
    t.storage_time = real(0);
    if (!(t.storage_time >= 0.0)) {
      throw SchemaError(fmt::format("{}:{}: column 't_seconds' must be >= 0", origin, line_no));
    }
    t.settings = {radians(real(1)), radians(real(2))};
    t.n_pulses = count(3);
    t.n_d1 = count(4);
    t.n_d2 = count(5);
    t.c13 = count(6);
    t.c24 = count(7);
    t.c14 = count(8);
    t.c23 = count(9);
    if (t.n_d1 + t.n_d2 > t.n_pulses) {
      throw SchemaError(
          fmt::format("{}:{}: column 'n_pulses' is smaller than the singles", origin, line_no));
    }
    if (t.c13 + t.c14 > t.n_d1) {
      throw SchemaError(
          fmt::format("{}:{}: column 'n_d1' is smaller than c13 + c14", origin, line_no));
    }
    if (t.c24 + t.c23 > t.n_d2) {
      throw SchemaError(
          fmt::format("{}:{}: column 'n_d2' is smaller than c24 + c23", origin, line_no));
    }
    tables.push_back(t);
  }
  if (tables.empty()) throw SchemaError(fmt::format("{}: no data rows", origin));
  return tables;
}

std::vector<DecaySample> parse_decay_csv(std::string_view text, std::string_view origin) {
  static constexpr const char* kNames[] = {"t_seconds", "R", "sigma"};
  const auto lines = data_lines(text);
  std::vector<DecaySample> samples;
  std::size_t width = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto [line_no, line] = lines[r];
    const auto cells = split(line);
    if (r == 0 && !to_double(cells.front())) {
      if (cells.size() < 2 || cells.size() > 3) {
        throw SchemaError(fmt::format("{}:{}: expected 2 or 3 columns", origin, line_no));
      }
      width = cells.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width || width < 2 || width > 3) {
      throw SchemaError(fmt::format("{}:{}: expected {} columns, found {}", origin, line_no,
                                    width < 2 || width > 3 ? std::size_t{2} : width, cells.size()));
    }
    double v[3] = {0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < width; ++k) {
      const auto x = to_double(cells[k]);
      if (!x) {
        throw SchemaError(fmt::format("{}:{}: column '{}': '{}' is not a number", origin, line_no,
                                      kNames[k], cells[k]));
      }
      v[k] = *x;
    }
    samples.push_back({v[0], v[1], v[2]});
  }
  if (samples.empty()) throw SchemaError(fmt::format("{}: no data rows", origin));
  return samples;
}

std::string format_records_csv(std::span<const TrialRecord> records, const AngleSettings& angles,
                               const Provenance& prov) {
  static constexpr const char* kStokes[] = {"none", "D1", "D2"};
  static constexpr const char* kAntiStokes[] = {"none", "D3", "D4"};
  std::string out = prov.comment_block();
  out += "trial_index,t_seconds,theta_s_deg,theta_as_deg,stokes_click,antistokes_click,pair_created\n";
  const double ts = degrees(angles.theta_s);
  const double tas = degrees(angles.theta_as);
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.trial_index, r.storage_time, ts, tas,
                       kStokes[static_cast<int>(r.stokes_click)],
                       kAntiStokes[static_cast<int>(r.antistokes_click)],
                       r.pair_created ? 1 : 0);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace dlcz
