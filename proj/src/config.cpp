#include "dlcz/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "dlcz/errors.hpp"

namespace dlcz {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + std::string(v) + "'");
  return x;
}

int parse_int(std::string_view v) {
  int x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + std::string(v) + "'");
  return x;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

struct Field {
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;  // empty for input-only aliases
};

using Member = double& (*)(Config&);

Field number(Member member) {
  return {[member](Config& c, std::string_view v) { member(c) = parse_double(v); },
          [member](const Config& c) { return fmt::format("{}", member(const_cast<Config&>(c))); }};
}

Field scaled_alias(Member member, double scale) {
  return {[member, scale](Config& c, std::string_view v) { member(c) = parse_double(v) * scale; },
          {}};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> f;
    // experiment
    f["experiment.chi"] = number([](Config& c) -> double& { return c.experiment.chi; });
    f["experiment.noise_b"] = number([](Config& c) -> double& { return c.experiment.noise_b; });
    f["experiment.noise_c"] = number([](Config& c) -> double& { return c.experiment.noise_c; });
    f["experiment.eta_s"] = number([](Config& c) -> double& { return c.experiment.eta_s; });
    f["experiment.eta_as"] = number([](Config& c) -> double& { return c.experiment.eta_as; });
    f["experiment.v0"] = number([](Config& c) -> double& { return c.experiment.v0; });
    f["experiment.phase"] = number([](Config& c) -> double& { return c.experiment.phase; });
    f["engine.double_pair"] = {
        [](Config& c, std::string_view v) { c.double_pair = parse_bool(v); },
        [](const Config& c) { return std::string(c.double_pair ? "true" : "false"); }};
    f["decay.r0"] = number([](Config& c) -> double& { return c.experiment.decay.r0; });
    f["decay.tau0"] = number([](Config& c) -> double& { return c.experiment.decay.tau0; });
    // detection chain
    f["chain.t_oc"] = number([](Config& c) -> double& { return c.chain.t_oc; });
    f["chain.cavity_loss"] = number([](Config& c) -> double& { return c.chain.cavity_loss; });
    f["chain.eta_smf"] = number([](Config& c) -> double& { return c.chain.eta_smf; });
    f["chain.eta_filter"] = number([](Config& c) -> double& { return c.chain.eta_filter; });
    f["chain.eta_mmf"] = number([](Config& c) -> double& { return c.chain.eta_mmf; });
    f["chain.eta_d"] = number([](Config& c) -> double& { return c.chain.eta_d; });
    // geometry
    f["geometry.wavelength"] = number([](Config& c) -> double& { return c.geometry.wavelength; });
    f["geometry.temperature"] = number([](Config& c) -> double& { return c.geometry.temperature; });
    f["geometry.atomic_mass"] = number([](Config& c) -> double& { return c.geometry.atomic_mass; });
    f["geometry.atomic_mass_u"] = scaled_alias(
        [](Config& c) -> double& { return c.geometry.atomic_mass; }, kAtomicMassUnit);
    f["geometry.bd_separation"] =
        number([](Config& c) -> double& { return c.geometry.bd_separation; });
    f["geometry.f_btd"] = number([](Config& c) -> double& { return c.geometry.f_btd; });
    f["geometry.f0"] = number([](Config& c) -> double& { return c.geometry.f0; });
    // timing
    f["timing.prep_duration"] = number([](Config& c) -> double& { return c.timing.prep_duration; });
    f["timing.run_duration"] = number([](Config& c) -> double& { return c.timing.run_duration; });
    f["timing.trial_period"] = number([](Config& c) -> double& { return c.timing.trial_period; });
    f["timing.write_duration"] =
        number([](Config& c) -> double& { return c.timing.write_duration; });
    f["timing.read_duration"] = number([](Config& c) -> double& { return c.timing.read_duration; });
    f["timing.clean_duration"] =
        number([](Config& c) -> double& { return c.timing.clean_duration; });
    f["timing.interval"] = number([](Config& c) -> double& { return c.timing.interval; });
    // CHSH analyzer angles, radians; *_deg aliases accept degrees
    const std::pair<const char*, Member> bell[] = {
        {"theta_s", [](Config& c) -> double& { return c.bell.theta_s; }},
        {"theta_s_prime", [](Config& c) -> double& { return c.bell.theta_s_prime; }},
        {"theta_as", [](Config& c) -> double& { return c.bell.theta_as; }},
        {"theta_as_prime", [](Config& c) -> double& { return c.bell.theta_as_prime; }},
    };
    for (const auto& [name, member] : bell) {
      f[std::string("bell.") + name] = number(member);
      f[std::string("bell.") + name + "_deg"] = scaled_alias(member, std::numbers::pi / 180.0);
    }
    // repeater
    f["repeater.nest_level"] = {
        [](Config& c, std::string_view v) { c.repeater.nest_level = parse_int(v); },
        [](const Config& c) { return fmt::format("{}", c.repeater.nest_level); }};
    f["repeater.modes"] = {[](Config& c, std::string_view v) { c.repeater.modes = parse_int(v); },
                           [](const Config& c) { return fmt::format("{}", c.repeater.modes); }};
    f["repeater.distance"] = number([](Config& c) -> double& { return c.repeater.distance; });
    f["repeater.attenuation_length"] =
        number([](Config& c) -> double& { return c.repeater.attenuation_length; });
    f["repeater.fiber_speed"] = number([](Config& c) -> double& { return c.repeater.fiber_speed; });
    f["repeater.chi"] = number([](Config& c) -> double& { return c.repeater.chi; });
    f["repeater.eta_fc"] = number([](Config& c) -> double& { return c.repeater.eta_fc; });
    f["repeater.eta_td"] = number([](Config& c) -> double& { return c.repeater.eta_td; });
    f["repeater.r0"] = number([](Config& c) -> double& { return c.repeater.r0; });
    f["repeater.tau0"] = number([](Config& c) -> double& { return c.repeater.tau0; });
    f["repeater.link_divisor"] = {
        [](Config& c, std::string_view v) {
          c.repeater.link_divisor = link_divisor_from_string(std::string(v));
        },
        [](const Config& c) { return to_string(c.repeater.link_divisor); }};
    f["repeater.linear_multiplexing"] = {
        [](Config& c, std::string_view v) { c.repeater.linear_multiplexing = parse_bool(v); },
        [](const Config& c) {
          return std::string(c.repeater.linear_multiplexing ? "true" : "false");
        }};
    return f;
  }();
  return table;
}

void validate_all(const Config& c) {
  c.experiment.validate();
  c.chain.validate();
  if (c.losses) c.losses->check_against(c.chain.cavity_loss);
  c.geometry.validate();
  c.timing.validate();
  c.bell.validate();
  c.repeater.validate();
}

}  // namespace

Config parse_config(std::string_view text, std::string_view origin) {
  Config config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto where = [&] { return fmt::format("{}:{}: ", origin, line_no); };
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where() + "expected 'key = value'");
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(where() + "duplicate key '" + std::string(key) + "'");
    }

    try {
      if (key.starts_with("losses.")) {
        const auto name = key.substr(7);
        if (name.empty()) throw ConfigError("empty loss item name");
        if (!config.losses) config.losses.emplace();
        config.losses->items.push_back({std::string(name), parse_double(value)});
        continue;
      }
      const auto it = fields().find(key);
      if (it == fields().end()) throw ConfigError("unknown key '" + std::string(key) + "'");
      it->second.set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }

  if (config.losses) {
    std::sort(config.losses->items.begin(), config.losses->items.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
  }
  try {
    validate_all(config);
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  }
  return config;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string canonical_dump(const Config& config) {
  std::string out;
  std::map<std::string, std::string> lines;
  for (const auto& [key, field] : fields()) {
    if (field.get) lines[key] = field.get(config);
  }
  if (config.losses) {
    for (const auto& item : config.losses->items) {
      lines["losses." + item.name] = fmt::format("{}", item.loss);
    }
  }
  for (const auto& [key, value] : lines) out += key + " = " + value + "\n";
  return out;
}

}  // namespace dlcz
