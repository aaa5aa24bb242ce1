#include "dlcz/mc_engine.hpp"

#include <algorithm>
#include <cmath>

#include "check.hpp"
#include "dlcz/decoherence.hpp"
#include "parallel.hpp"

namespace dlcz {

using detail::require;

namespace {

constexpr std::uint64_t kTrialsPerChunk = 1 << 16;

StokesClick stokes_from(CounterRng& rng) {
  return rng.uniform() < 0.5 ? StokesClick::kD1 : StokesClick::kD2;
}

AntiStokesClick antistokes_from(CounterRng& rng) {
  return rng.uniform() < 0.5 ? AntiStokesClick::kD3 : AntiStokesClick::kD4;
}

}  // namespace

TrialSampler::TrialSampler(const ExperimentParams& params, double t, const AngleSettings& angles,
                           bool double_pair)
    : t_(t) {
  params.validate();
  const double r = retrieval_decay(params.decay, t);
  const auto joint = projection_probs(angles, params.v0, params.phase);

  chi_ = params.chi;
  double_threshold_ = double_pair ? params.chi * params.chi / 2.0 : -1.0;
  eta_s_ = params.eta_s;
  stokes_noise_ = params.noise_b * params.eta_s;
  signal_or_noise_ = std::min(1.0, eta_s_ + stokes_noise_);
  retrieve_ = r * params.eta_as;
  as_noise_ = params.noise_c * params.eta_as;
  retrieve_or_noise_ = std::min(1.0, retrieve_ + as_noise_);
  cum13_ = joint.p13;
  cum24_ = cum13_ + joint.p24;
  cum14_ = cum24_ + joint.p14;
}

TrialSampler::Pair TrialSampler::draw_joint(CounterRng& rng) const {
  const double u = rng.uniform();
  if (u < cum13_) return {StokesClick::kD1, AntiStokesClick::kD3};
  if (u < cum24_) return {StokesClick::kD2, AntiStokesClick::kD4};
  if (u < cum14_) return {StokesClick::kD1, AntiStokesClick::kD4};
  return {StokesClick::kD2, AntiStokesClick::kD3};
}

TrialRecord TrialSampler::sample(CounterRng& rng, std::uint64_t trial_index) const {
  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.storage_time = t_;

  const double u = rng.uniform();
  const int pairs = u < double_threshold_ ? 2 : (u < chi_ ? 1 : 0);
  rec.pair_created = pairs > 0;

  if (pairs == 0) {
    if (rng.uniform() < stokes_noise_) {
      rec.stokes_click = stokes_from(rng);
      if (rng.uniform() < as_noise_) rec.antistokes_click = antistokes_from(rng);
    }
    return rec;
  }

  if (pairs == 1) {
    const double us = rng.uniform();
    if (us < eta_s_) {
      const Pair joint = draw_joint(rng);
      rec.stokes_click = joint.s;
      const double ua = rng.uniform();
      if (ua < retrieve_) {
        rec.antistokes_click = joint.as;
      } else if (ua < retrieve_or_noise_) {
        rec.antistokes_click = antistokes_from(rng);
      }
    } else if (us < signal_or_noise_) {
      // A background click heralds; the lost pair's spin wave is cleaned out
      // with the next pump and is not read.
      rec.stokes_click = stokes_from(rng);
      if (rng.uniform() < as_noise_) rec.antistokes_click = antistokes_from(rng);
    }
    return rec;
  }

  // Two independent pairs. Both spin waves are read once either Stokes
  // photon heralds; the first pair takes precedence on each detector bank.
  const Pair first = draw_joint(rng);
  const Pair second = draw_joint(rng);
  const bool s1 = rng.uniform() < eta_s_;
  const bool s2 = rng.uniform() < eta_s_;
  if (s1) {
    rec.stokes_click = first.s;
  } else if (s2) {
    rec.stokes_click = second.s;
  } else if (rng.uniform() < stokes_noise_) {
    rec.stokes_click = stokes_from(rng);
  }
  if (!rec.read_fired()) return rec;

  const bool a1 = rng.uniform() < retrieve_;
  const bool a2 = rng.uniform() < retrieve_;
  if (a1) {
    rec.antistokes_click = first.as;
  } else if (a2) {
    rec.antistokes_click = second.as;
  } else if (rng.uniform() < as_noise_) {
    rec.antistokes_click = antistokes_from(rng);
  }
  return rec;
}

void TrialSampler::tally(const TrialRecord& rec, CountsTable& table) {
  ++table.n_pulses;
  switch (rec.stokes_click) {
    case StokesClick::kNone:
      return;
    case StokesClick::kD1:
      ++table.n_d1;
      if (rec.antistokes_click == AntiStokesClick::kD3) ++table.c13;
      if (rec.antistokes_click == AntiStokesClick::kD4) ++table.c14;
      return;
    case StokesClick::kD2:
      ++table.n_d2;
      if (rec.antistokes_click == AntiStokesClick::kD4) ++table.c24;
      if (rec.antistokes_click == AntiStokesClick::kD3) ++table.c23;
      return;
  }
}

TrialRecord run_trial(const ExperimentParams& params, double t, const AngleSettings& angles,
                      CounterRng& rng, bool double_pair, std::uint64_t trial_index) {
  return TrialSampler(params, t, angles, double_pair).sample(rng, trial_index);
}

ExperimentResult run_experiment(const ExperimentParams& params, const CycleTiming& timing,
                                double t, std::span<const AngleSettings> angle_list,
                                std::uint64_t n_trials_per_setting, std::uint64_t seed,
                                const EngineOptions& options) {
  require<ConfigError>(!angle_list.empty(), "run_experiment needs at least one angle setting");
  require<ConfigError>(n_trials_per_setting > 0, "trials per setting must be positive");
  require(std::isfinite(t) && t >= 0.0, "storage time must be non-negative");
  timing.validate();

  const unsigned threads = detail::resolve_threads(options.threads);
  ExperimentResult result;
  result.tables.reserve(angle_list.size());
  if (options.keep_records) result.records.resize(angle_list.size());

  for (std::size_t s = 0; s < angle_list.size(); ++s) {
    const TrialSampler sampler(params, t, angle_list[s], options.double_pair);
    const std::uint64_t base = s * n_trials_per_setting;
    const std::uint64_t chunks = (n_trials_per_setting + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<CountsTable> partial(chunks);
    auto* records = options.keep_records ? &result.records[s] : nullptr;
    if (records) records->resize(n_trials_per_setting);

    detail::parallel_chunks(n_trials_per_setting, chunks, threads,
                            [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                              CountsTable local;
                              for (std::uint64_t k = begin; k < end; ++k) {
                                CounterRng rng(seed, base + k);
                                const TrialRecord rec = sampler.sample(rng, base + k);
                                TrialSampler::tally(rec, local);
                                if (records) (*records)[k] = rec;
                              }
                              partial[c] = local;
                            });

    CountsTable table;
    for (const auto& p : partial) table += p;
    table.settings = angle_list[s];
    table.storage_time = t;
    result.tables.push_back(table);
  }

  const std::uint64_t total = n_trials_per_setting * angle_list.size();
  const std::uint64_t per_run = timing.trials_per_run();
  const std::uint64_t cycles = (total + per_run - 1) / per_run;
  result.simulated_wall_time = static_cast<double>(cycles) * timing.cycle_duration();
  return result;
}

ExpectedCounts expected_counts(const ExperimentParams& params, double t,
                               const AngleSettings& angles, double n_pulses,
                               CoincidenceModel model) {
  require(n_pulses >= 0.0, "pulse count must be non-negative");
  const auto p = forward_count_probs(params, t, angles, model);
  ExpectedCounts e;
  e.settings = angles;
  e.storage_time = t;
  e.n_pulses = n_pulses;
  e.n_d1 = n_pulses * p.p_d1;
  e.n_d2 = n_pulses * p.p_d2;
  e.c13 = n_pulses * p.p13;
  e.c24 = n_pulses * p.p24;
  e.c14 = n_pulses * p.p14;
  e.c23 = n_pulses * p.p23;
  return e;
}

}  // namespace dlcz
