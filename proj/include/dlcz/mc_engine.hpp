#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dlcz/counts.hpp"
#include "dlcz/entanglement.hpp"
#include "dlcz/params.hpp"
#include "dlcz/rng.hpp"

namespace dlcz {

enum class StokesClick : std::uint8_t { kNone, kD1, kD2 };
enum class AntiStokesClick : std::uint8_t { kNone, kD3, kD4 };

/// Outcome of one write attempt and, if heralded, its read.
struct TrialRecord {
  std::uint64_t trial_index = 0;
  double storage_time = 0.0;
  StokesClick stokes_click = StokesClick::kNone;
  AntiStokesClick antistokes_click = AntiStokesClick::kNone;
  bool pair_created = false;  ///< ground truth, diagnostics only

  /// The read pulse is fired only after a Stokes click.
  bool read_fired() const { return stokes_click != StokesClick::kNone; }
  bool operator==(const TrialRecord&) const = default;
};

struct EngineOptions {
  /// Draw two independent pairs with probability chi^2/2 (out of chi).
  bool double_pair = false;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on this value.
  unsigned threads = 0;
  /// Keep every TrialRecord (memory grows with the trial count).
  bool keep_records = false;
};

/// Samples trials for fixed parameters, storage time and analyzer setting.
///
/// One write pulse creates a pair with probability chi. The Stokes channel
/// clicks on the pair photon with probability eta_S, otherwise on background
/// with probability B eta_S. A click triggers the read after t: a
/// signal-heralded spin wave is retrieved and detected with probability
/// R(t) eta_aS on the detector pair drawn from projection_probs, otherwise
/// anti-Stokes background clicks with probability C eta_aS. Background clicks
/// pick either detector of their channel with equal weight. Averaged over
/// trials this reproduces forward_count_probs with
/// CoincidenceModel::kFeedForward exactly.
class TrialSampler {
 public:
  TrialSampler(const ExperimentParams& params, double t, const AngleSettings& angles,
               bool double_pair = false);

  TrialRecord sample(CounterRng& rng, std::uint64_t trial_index) const;

  /// Adds one record to a table.
  static void tally(const TrialRecord& record, CountsTable& table);

 private:
  struct Pair {
    StokesClick s;
    AntiStokesClick as;
  };
  Pair draw_joint(CounterRng& rng) const;

  double t_;
  double chi_;
  double double_threshold_;
  double eta_s_;
  double stokes_noise_;     // B eta_S
  double signal_or_noise_;  // eta_S + B eta_S, capped at 1
  double retrieve_;         // R(t) eta_aS
  double as_noise_;         // C eta_aS
  double retrieve_or_noise_;
  double cum13_, cum24_, cum14_;
};

/// One trial with its own stream. Equivalent to
/// TrialSampler(params, t, angles, double_pair).sample(rng, trial_index).
TrialRecord run_trial(const ExperimentParams& params, double t, const AngleSettings& angles,
                      CounterRng& rng, bool double_pair = false, std::uint64_t trial_index = 0);

struct ExperimentResult {
  std::vector<CountsTable> tables;               ///< one per setting, input order
  double simulated_wall_time = 0.0;              ///< s, including preparation
  std::vector<std::vector<TrialRecord>> records;  ///< per setting, if requested
};

/// Runs n_trials_per_setting trials at each setting. Trial k of setting s
/// has global index s * n_trials_per_setting + k and draws from
/// CounterRng(seed, global index), so tables are bit-identical for a given
/// seed whatever the thread count. Wall time counts whole preparation/run
/// cycles needed for all trials.
ExperimentResult run_experiment(const ExperimentParams& params, const CycleTiming& timing,
                                double t, std::span<const AngleSettings> angle_list,
                                std::uint64_t n_trials_per_setting, std::uint64_t seed,
                                const EngineOptions& options = {});

/// Expected counts after n_pulses trials under the analytic model.
ExpectedCounts expected_counts(const ExperimentParams& params, double t,
                               const AngleSettings& angles, double n_pulses,
                               CoincidenceModel model = CoincidenceModel::kFeedForward);

}  // namespace dlcz
