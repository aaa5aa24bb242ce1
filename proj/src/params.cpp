#include "dlcz/params.hpp"

#include <cmath>

#include "check.hpp"

namespace dlcz {

using detail::in_half_open_unit;
using detail::in_unit;
using detail::positive;
using detail::require;

void DecayParams::validate() const {
  require(in_unit(r0), "decay.r0 must lie in [0,1]");
  require(positive(tau0), "decay.tau0 must be positive");
}

void DetectionChain::validate() const {
  require(in_half_open_unit(t_oc), "chain.t_oc must lie in (0,1]");
  require(std::isfinite(cavity_loss) && cavity_loss >= 0.0 && cavity_loss < 1.0,
          "chain.cavity_loss must lie in [0,1)");
  require(in_half_open_unit(eta_smf), "chain.eta_smf must lie in (0,1]");
  require(in_half_open_unit(eta_filter), "chain.eta_filter must lie in (0,1]");
  require(in_half_open_unit(eta_mmf), "chain.eta_mmf must lie in (0,1]");
  require(in_half_open_unit(eta_d), "chain.eta_d must lie in (0,1]");
}

double LossBudget::total() const {
  double sum = 0.0;
  for (const auto& item : items) sum += item.loss;
  return sum;
}

void LossBudget::check_against(double cavity_loss) const {
  for (const auto& item : items) {
    require(in_unit(item.loss), "loss item '" + item.name + "' must lie in [0,1]");
  }
  require(std::abs(total() - cavity_loss) <= 1e-6,
          "itemised losses do not sum to chain.cavity_loss");
}

LossBudget LossBudget::as_built() {
  return {{{"bs1", 0.01}, {"bs2", 0.03}, {"hr_mirrors", 0.01}, {"optics", 0.048},
           {"arm_escape", 0.032}}};
}

void EnsembleGeometry::validate() const {
  require(positive(wavelength), "geometry.wavelength must be positive");
  require(positive(temperature), "geometry.temperature must be positive");
  require(positive(atomic_mass), "geometry.atomic_mass must be positive");
  require(positive(bd_separation), "geometry.bd_separation must be positive");
  require(positive(f_btd), "geometry.f_btd must be positive");
  require(positive(f0), "geometry.f0 must be positive");
}

void ExperimentParams::validate() const {
  require(in_unit(chi), "experiment.chi must lie in [0,1]");
  require(in_unit(noise_b), "experiment.noise_b must lie in [0,1]");
  require(in_unit(noise_c), "experiment.noise_c must lie in [0,1]");
  require(chi + noise_b <= 1.0, "experiment.chi + experiment.noise_b must not exceed 1");
  require(in_half_open_unit(eta_s), "experiment.eta_s must lie in (0,1]");
  require(in_half_open_unit(eta_as), "experiment.eta_as must lie in (0,1]");
  require(in_unit(v0), "experiment.v0 must lie in [0,1]");
  require(std::isfinite(phase), "experiment.phase must be finite");
  decay.validate();
}

void CycleTiming::validate() const {
  require(std::isfinite(prep_duration) && prep_duration >= 0.0,
          "timing.prep_duration must be non-negative");
  require(positive(run_duration), "timing.run_duration must be positive");
  require(positive(trial_period), "timing.trial_period must be positive");
  require(trials_per_run() > 0, "timing.run_duration must hold at least one trial");
}

std::uint64_t CycleTiming::trials_per_run() const {
  require(positive(trial_period), "timing.trial_period must be positive");
  const double ratio = run_duration / trial_period;
  // 8 ms / 2 us is not exactly 4000 in binary floating point.
  return static_cast<std::uint64_t>(std::floor(ratio * (1.0 + 1e-12)));
}

double cavity_escape_efficiency(double t_oc, double cavity_loss) {
  require(positive(t_oc) && t_oc <= 1.0, "t_oc must lie in (0,1]");
  require(cavity_loss >= 0.0 && cavity_loss < 1.0, "cavity loss must lie in [0,1)");
  return t_oc / (t_oc + cavity_loss);
}

double transmission_efficiency(const DetectionChain& chain) {
  chain.validate();
  return chain.eta_smf * chain.eta_filter * chain.eta_mmf;
}

double total_detection_efficiency(const DetectionChain& chain) {
  chain.validate();
  return cavity_escape_efficiency(chain.t_oc, chain.cavity_loss) * transmission_efficiency(chain) *
         chain.eta_d;
}

double coupling_angle(const EnsembleGeometry& geom) {
  require(positive(geom.bd_separation) && positive(geom.f_btd) && positive(geom.f0),
          "coupling angle needs positive D, F_BTD and F0");
  return geom.bd_separation / (2.0 * geom.f_btd * geom.f0);
}

double repetition_rate(const CycleTiming& timing) {
  timing.validate();
  return static_cast<double>(timing.trials_per_run()) / timing.cycle_duration();
}

}  // namespace dlcz
