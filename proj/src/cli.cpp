#include "dlcz/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dlcz/config.hpp"
#include "dlcz/decoherence.hpp"
#include "dlcz/errors.hpp"
#include "dlcz/estimators.hpp"
#include "dlcz/io.hpp"
#include "dlcz/mc_engine.hpp"
#include "dlcz/params.hpp"
#include "dlcz/repeater.hpp"

namespace dlcz {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSimulateSeedDomain = 0x73696d756c617465ULL;

enum class Format { kKv, kCsv };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "kv";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Configuration file (key = value)");
  cmd->add_option("--out", c.out_dir, "Output directory (default: $DLCZ_OUT_DIR or .)");
  cmd->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"kv", "csv"}));
  cmd->add_option("--threads", c.threads, "Worker threads, 0 = all cores; never changes results");
}

// A key/value report rendered either as `key = value` lines or as a one-row CSV.
class Report {
 public:
  void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) { add(std::move(key), fmt::format("{}", value)); }

  std::string render(Format f, const Provenance& prov) const {
    std::string out = prov.comment_block();
    if (f == Format::kKv) {
      for (const auto& [k, v] : rows_) out += k + " = " + v + "\n";
      return out;
    }
    std::string header, row;
    for (const auto& [k, v] : rows_) {
      header += (header.empty() ? "" : ",") + k;
      row += (row.empty() ? "" : ",") + v;
    }
    return out + header + "\n" + row + "\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

// Loaded configuration, output directory and the provenance shared by all
// files of one command.
class Run {
 public:
  Run(std::string command, const Common& c, std::ostream& out)
      : command_(std::move(command)), common_(c), out_(out) {
    config_ = c.config_path.empty() ? Config{} : load_config(c.config_path);
    format_ = c.format == "csv" ? Format::kCsv : Format::kKv;
    if (!c.out_dir.empty()) {
      dir_ = c.out_dir;
    } else if (const char* env = std::getenv("DLCZ_OUT_DIR"); env && *env) {
      dir_ = env;
    } else {
      dir_ = ".";
    }
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw IoError("cannot create output directory '" + dir_.string() + "'");
    }
  }

  Config& config() { return config_; }
  Format format() const { return format_; }
  std::uint64_t seed() const { return common_.seed.value_or(0); }
  unsigned threads() const { return common_.threads; }

  Provenance provenance(std::vector<std::pair<std::string, std::string>> extra = {}) const {
    return {command_, sha256_hex(canonical_dump(config_)), seed(), std::move(extra)};
  }

  void write(const std::string& name, const std::string& content) {
    write_text_file(dir_ / name, content);
    outputs_.push_back(name);
  }

  std::string report_name() const {
    return command_ + (format_ == Format::kCsv ? "_report.csv" : "_report.txt");
  }

  void emit_report(const std::string& text) {
    write(report_name(), text);
    out_ << text;
  }

  void finish() {
    std::string m;
    m += "command = " + command_ + "\n";
    m += "config_path = " + (common_.config_path.empty() ? std::string("<defaults>") : common_.config_path) + "\n";
    m += fmt::format("seed = {}\n", seed());
    m += "output_dir = " + dir_.string() + "\n";
    m += "config_hash = " + sha256_hex(canonical_dump(config_)) + "\n";
    std::string list;
    for (const auto& o : outputs_) list += (list.empty() ? "" : ",") + o;
    m += "outputs = " + list + "\n";
    write_text_file(dir_ / (command_ + ".manifest"), m);
  }

 private:
  std::string command_;
  Common common_;
  std::ostream& out_;
  Config config_;
  Format format_ = Format::kKv;
  fs::path dir_;
  std::vector<std::string> outputs_;
};

std::vector<AngleSettings> angle_plan(const std::string& plan, const BellSettings& bell) {
  const auto combos = bell.combinations();
  if (plan == "bell") return {combos.begin(), combos.end()};
  if (plan == "zero") return {AngleSettings{0.0, 0.0}};
  if (plan == "all") {
    std::vector<AngleSettings> v{AngleSettings{0.0, 0.0}};
    v.insert(v.end(), combos.begin(), combos.end());
    return v;
  }
  std::vector<AngleSettings> v;
  std::size_t pos = 0;
  while (pos <= plan.size()) {
    const auto comma = plan.find(',', pos);
    const auto item = plan.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? plan.size() + 1 : comma + 1;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("--angles: expected bell, zero, all or 'theta_s:theta_as,...' in degrees, got '" + item + "'");
    }
    try {
      std::size_t used_a = 0, used_b = 0;
      const std::string a = item.substr(0, colon), b = item.substr(colon + 1);
      const double ts = std::stod(a, &used_a);
      const double tas = std::stod(b, &used_b);
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(item);
      v.push_back({radians(ts), radians(tas)});
    } catch (const std::logic_error&) {
      throw ConfigError("--angles: cannot read '" + item + "' as degrees");
    }
  }
  return v;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  std::uint64_t trials = 1000000;
  std::vector<double> t{0.0};
  std::string angles = "bell";
  bool records = false;
};

void simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.trials == 0) throw ConfigError("--trials must be positive");
  if (a.t.empty()) throw ConfigError("--t needs at least one storage time");
  Run run("simulate", a.common, out);
  const auto& cfg = run.config();
  const auto plan = angle_plan(a.angles, cfg.bell);

  EngineOptions opts;
  opts.double_pair = cfg.double_pair;
  opts.threads = run.threads();
  opts.keep_records = a.records;

  Report report;
  report.add("trials_per_setting", fmt::format("{}", a.trials));
  report.add("storage_times", static_cast<double>(a.t.size()));
  report.add("settings", static_cast<double>(plan.size()));
  double wall = 0.0;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    const std::uint64_t seed = CounterRng(run.seed(), i, kSimulateSeedDomain)();
    const auto result = run_experiment(cfg.experiment, cfg.timing, a.t[i], plan, a.trials, seed, opts);
    wall += result.simulated_wall_time;
    for (std::size_t j = 0; j < plan.size(); ++j) {
      const auto prov = run.provenance({{"storage_time_s", fmt::format("{}", a.t[i])},
                                        {"theta_s_deg", fmt::format("{}", degrees(plan[j].theta_s))},
                                        {"theta_as_deg", fmt::format("{}", degrees(plan[j].theta_as))},
                                        {"trials", fmt::format("{}", a.trials)},
                                        {"simulated_wall_time_s", fmt::format("{}", result.simulated_wall_time)}});
      const auto name = fmt::format("counts_t{:02}_a{}.csv", i, j);
      run.write(name, format_counts_csv(std::span(&result.tables[j], 1), prov));
      report.add(fmt::format("file.t{:02}_a{}", i, j), name);
      if (a.records) {
        const auto rname = fmt::format("records_t{:02}_a{}.csv", i, j);
        run.write(rname, format_records_csv(result.records[j], plan[j], prov));
      }
    }
  }
  report.add("simulated_wall_time_s", wall);
  run.emit_report(report.render(run.format(), run.provenance()));
  run.finish();
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  Common common;
  std::vector<std::string> files;
  std::optional<double> eta_td;
  int replicas = 10000;
};

struct Quantity {
  std::string name;
  std::optional<EstimateWithError> value;  // nullopt: unavailable
  bool has_sigma = true;
};

void estimate(const EstimateArgs& a, std::ostream& out) {
  Run run("estimate", a.common, out);
  const auto& cfg = run.config();
  const double eta_td = a.eta_td.value_or(cfg.experiment.eta_as);
  if (!(eta_td > 0.0 && eta_td <= 1.0)) throw DomainError("--eta-td must lie in (0, 1]");

  std::string digests;
  std::map<double, std::vector<CountsTable>> groups;
  for (const auto& f : a.files) {
    const auto text = read_text_file(f);
    digests += sha256_hex(text) + "\n";
    for (const auto& table : parse_counts_csv(text, f)) {
      auto& g = groups[table.storage_time];
      auto same = std::find_if(g.begin(), g.end(), [&](const CountsTable& x) {
        return x.settings.same_analysis(table.settings);
      });
      if (same == g.end()) {
        g.push_back(table);
      } else {
        *same += table;
      }
    }
  }
  const std::string inputs_hash = sha256_hex(digests);

  const auto find = [](const std::vector<CountsTable>& g, const AngleSettings& s) -> const CountsTable* {
    for (const auto& x : g) {
      if (x.settings.same_analysis(s)) return &x;
    }
    return nullptr;
  };

  std::vector<std::pair<double, std::vector<Quantity>>> results;
  std::string samples;
  for (const auto& [t, g] : groups) {
    std::vector<Quantity> q;
    const auto* zero = find(g, {0.0, 0.0});
    const auto one = [&](const CountsEstimator& est) {
      return poisson_error(est, std::span(zero, 1), a.replicas, run.seed(), run.threads());
    };
    if (zero) {
      const auto r = one([&](auto tb) { return intrinsic_retrieval_qubit(tb[0], eta_td); });
      q.push_back({"R_qubit", r});
      q.push_back({"R_L", one([&](auto tb) { return intrinsic_retrieval_mode(tb[0], SpinWaveMode::kL, eta_td); })});
      q.push_back({"R_R", one([&](auto tb) { return intrinsic_retrieval_mode(tb[0], SpinWaveMode::kR, eta_td); })});
      samples += fmt::format("{},{},{}\n", t, r.value, r.sigma);
    } else {
      q.push_back({"R_qubit", std::nullopt});
      q.push_back({"R_L", std::nullopt});
      q.push_back({"R_R", std::nullopt});
    }

    const auto combos = cfg.bell.combinations();
    std::vector<CountsTable> bell;
    for (const auto& s : combos) {
      if (const auto* x = find(g, s)) bell.push_back(*x);
    }
    if (bell.size() == 4) {
      for (std::size_t k = 0; k < 4; ++k) {
        q.push_back({fmt::format("E{}", k + 1),
                     poisson_error([](auto tb) { return correlation_E(tb[0]); }, std::span(&bell[k], 1),
                                   a.replicas, run.seed(), run.threads())});
      }
      const auto b = bell_S(bell, cfg.bell, a.replicas, run.seed(), run.threads());
      const double k_v = 1.0 / (2.0 * std::numbers::sqrt2);
      q.push_back({"S", b.s});
      q.push_back({"V", EstimateWithError{visibility_from_S(b.s.value), b.s.sigma * k_v}});
      q.push_back({"F", EstimateWithError{fidelity_from_S(b.s.value), b.s.sigma * 0.75 * k_v}});
      q.push_back({"violation_sigmas",
                   EstimateWithError{b.s.sigma > 0.0 ? b.violation_sigmas() : std::nan(""), 0.0}, false});
    } else {
      for (const char* name : {"E1", "E2", "E3", "E4", "S", "V", "F", "violation_sigmas"}) {
        q.push_back({name, std::nullopt});
      }
    }
    results.emplace_back(t, std::move(q));
  }

  const auto prov = run.provenance({{"inputs_hash", inputs_hash},
                                    {"eta_td", fmt::format("{}", eta_td)},
                                    {"replicas", fmt::format("{}", a.replicas)}});
  std::string text = prov.comment_block();
  if (run.format() == Format::kKv) {
    text += "inputs_hash = " + inputs_hash + "\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      text += fmt::format("t{}.t_seconds = {}\n", i, results[i].first);
      for (const auto& [name, v, has_sigma] : results[i].second) {
        if (v) {
          text += fmt::format("t{}.{} = {}\n", i, name, v->value);
          if (has_sigma) text += fmt::format("t{}.{}.sigma = {}\n", i, name, v->sigma);
        } else {
          text += fmt::format("t{}.{} = unavailable\n", i, name);
        }
      }
    }
  } else {
    text += "t_seconds,quantity,value,sigma,inputs_hash\n";
    for (const auto& [t, qs] : results) {
      for (const auto& [name, v, has_sigma] : qs) {
        text += v ? fmt::format("{},{},{},{},{}\n", t, name, v->value,
                                has_sigma ? fmt::format("{}", v->sigma) : std::string("nan"), inputs_hash)
                  : fmt::format("{},{},nan,nan,{}\n", t, name, inputs_hash);
      }
    }
  }
  run.emit_report(text);
  if (!samples.empty()) {
    run.write("retrieval_samples.csv", prov.comment_block() + "t_seconds,R,sigma\n" + samples);
  }
  run.finish();
}

// ---------------------------------------------------------------- fit-decay

struct FitArgs {
  Common common;
  std::string samples;
};

void fit_decay_cmd(const FitArgs& a, std::ostream& out) {
  Run run("fit-decay", a.common, out);
  const auto text = read_text_file(a.samples);
  const auto samples = parse_decay_csv(text, a.samples);
  const auto fit = fit_decay(samples);
  Report r;
  r.add("R0", fit.params.r0);
  r.add("R0_sigma", fit.r0_sigma);
  r.add("tau0_seconds", fit.params.tau0);
  r.add("tau0_sigma", fit.tau0_sigma);
  r.add("residual", fit.residual);
  r.add("iterations", static_cast<double>(fit.iterations));
  r.add("weighted", fit.weighted ? "true" : "false");
  r.add("n_samples", static_cast<double>(samples.size()));
  run.emit_report(r.render(run.format(), run.provenance({{"inputs_hash", sha256_hex(text)}})));
  run.finish();
}

// ---------------------------------------------------------------- lifetime, budget

void lifetime_cmd(const Common& c, std::ostream& out) {
  Run run("lifetime", c, out);
  const auto& g = run.config().geometry;
  const double theta = coupling_angle(g);
  Report r;
  r.add("theta_rad", theta);
  r.add("theta_deg", degrees(theta));
  r.add("tau_a_seconds", motional_lifetime(g));
  run.emit_report(r.render(run.format(), run.provenance()));
  run.finish();
}

void budget_cmd(const Common& c, std::ostream& out) {
  Run run("budget", c, out);
  const auto& cfg = run.config();
  Report r;
  r.add("eta_esp", cavity_escape_efficiency(cfg.chain.t_oc, cfg.chain.cavity_loss));
  r.add("eta_t", transmission_efficiency(cfg.chain));
  r.add("eta_td", total_detection_efficiency(cfg.chain));
  r.add("cavity_loss", cfg.chain.cavity_loss);
  if (cfg.losses) r.add("loss_budget_total", cfg.losses->total());
  r.add("trials_per_run", fmt::format("{}", cfg.timing.trials_per_run()));
  r.add("cycle_duration_s", cfg.timing.cycle_duration());
  r.add("repetition_rate_hz", repetition_rate(cfg.timing));
  run.emit_report(r.render(run.format(), run.provenance()));
  run.finish();
}

// ---------------------------------------------------------------- repeater-sweep

struct SweepArgs {
  Common common;
  std::string preset;
  double l_min = 1.0e4;
  double l_max = 2.0e6;
  int steps = 200;
  std::string grid = "log";
  double threshold = kFig8AnchorRate;
};

void repeater_sweep_cmd(const SweepArgs& a, std::ostream& out) {
  Run run("repeater-sweep", a.common, out);
  auto& cfg = run.config();
  std::vector<RepeaterParams> curves;
  if (a.preset == "fig8") {
    cfg.repeater = fig8_preset(0.8);
    curves = {fig8_preset(0.8), fig8_preset(0.6)};
  } else {
    curves = {cfg.repeater};
  }
  const Grid grid = a.grid == "linear" ? Grid::kLinear : Grid::kLog;

  const auto prov = run.provenance(
      {{"preset", a.preset.empty() ? "none" : a.preset},
       {"link_divisor", to_string(curves.front().link_divisor)},
       {"linear_multiplexing", curves.front().linear_multiplexing ? "true" : "false"},
       {"grid", a.grid}});
  std::string data = prov.comment_block();
  data += "curve,r0,L_meters,rate_per_second,t_cc,p0,p0_multiplexed,p_pr,underflow\n";
  Report r;
  r.add("threshold_rate", a.threshold);
  std::vector<double> crossings;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto sweep = sweep_distance(curves[c], a.l_min, a.l_max, a.steps, grid, run.threads());
    for (const auto& pt : sweep.points) {
      const auto& b = pt.breakdown;
      data += fmt::format("{},{},{},{},{},{},{},{},{}\n", c, curves[c].r0, pt.distance, b.rate,
                          b.t_cc, b.p0, b.p0_multiplexed, b.p_pr, b.underflow ? 1 : 0);
    }
    r.add(fmt::format("curve{}.r0", c), curves[c].r0);
    r.add(fmt::format("curve{}.chi", c), curves[c].chi);
    r.add(fmt::format("curve{}.monotone", c), sweep.monotone ? "true" : "false");
    try {
      const double l = threshold_distance(curves[c], a.threshold, a.l_min, a.l_max);
      crossings.push_back(l);
      r.add(fmt::format("curve{}.threshold_distance_m", c), l);
    } catch (const DomainError&) {
      r.add(fmt::format("curve{}.threshold_distance_m", c), "unavailable");
    }
  }
  if (curves.size() == 2) {
    r.add("crossing_ratio", crossings.size() == 2 ? fmt::format("{}", crossings[0] / crossings[1])
                                                  : std::string("unavailable"));
  }
  run.write("repeater_sweep.csv", data);
  run.emit_report(r.render(run.format(), prov));
  run.finish();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return kExitValidation;
  }
  return kExitNumeric;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and analysis of a cavity-enhanced DLCZ spin-wave memory", "dlcz"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte-Carlo counts tables");
  add_common(c_sim, sim.common);
  c_sim->add_option("--seed", sim.common.seed, "Master seed")->required();
  c_sim->add_option("--trials", sim.trials, "Trials per setting and storage time");
  c_sim->add_option("--t", sim.t, "Storage times in seconds")->delimiter(',');
  c_sim->add_option("--angles", sim.angles, "bell, zero, all or 'theta_s:theta_as,...' (degrees)");
  c_sim->add_flag("--records", sim.records, "Also write per-trial records");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Efficiencies and CHSH parameter from counts CSVs");
  add_common(c_est, est.common);
  c_est->add_option("--seed", est.common.seed, "Seed of the Poisson replicas (default 0)");
  c_est->add_option("files", est.files, "Counts CSV files")->required();
  c_est->add_option("--eta-td", est.eta_td, "Anti-Stokes detection efficiency (default experiment.eta_as)");
  c_est->add_option("--replicas", est.replicas, "Poisson replicas for error bars");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit-decay", "Fit R0 and tau0 to (t, R[, sigma]) samples");
  add_common(c_fit, fit.common);
  c_fit->add_option("--seed", fit.common.seed, "Recorded in the manifest");
  c_fit->add_option("samples", fit.samples, "Samples CSV")->required();

  Common life;
  auto* c_life = app.add_subcommand("lifetime", "Write angle and motional spin-wave lifetime");
  add_common(c_life, life);
  c_life->add_option("--seed", life.seed, "Recorded in the manifest");

  Common budget;
  auto* c_budget = app.add_subcommand("budget", "Detection efficiency budget and repetition rate");
  add_common(c_budget, budget);
  c_budget->add_option("--seed", budget.seed, "Recorded in the manifest");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("repeater-sweep", "Repeater rate versus distance");
  add_common(c_sweep, sweep.common);
  c_sweep->add_option("--seed", sweep.common.seed, "Recorded in the manifest");
  c_sweep->add_option("--preset", sweep.preset, "Two-curve long-distance preset")
      ->check(CLI::IsMember({"fig8"}));
  c_sweep->add_option("--l-min", sweep.l_min, "Shortest distance, m");
  c_sweep->add_option("--l-max", sweep.l_max, "Longest distance, m");
  c_sweep->add_option("--steps", sweep.steps, "Grid points");
  c_sweep->add_option("--grid", sweep.grid, "Grid spacing")->check(CLI::IsMember({"log", "linear"}));
  c_sweep->add_option("--threshold", sweep.threshold, "Rate for the crossing distance, 1/s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*c_sim) simulate(sim, out);
    if (*c_est) estimate(est, out);
    if (*c_fit) fit_decay_cmd(fit, out);
    if (*c_life) lifetime_cmd(life, out);
    if (*c_budget) budget_cmd(budget, out);
    if (*c_sweep) repeater_sweep_cmd(sweep, out);
  } catch (const Error& e) {
    err << "dlcz: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace dlcz
