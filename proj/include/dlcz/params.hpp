#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace dlcz {

inline constexpr double kBoltzmann = 1.380649e-23;          // J/K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg

/// Zero-delay retrieval efficiency and 1/e lifetime of the spin-wave memory.
struct DecayParams {
  double r0 = 0.77;
  double tau0 = 1.0e-3;  ///< seconds

  void validate() const;
  bool operator==(const DecayParams&) const = default;
};

/// Cavity output coupling and the optical path from the cavity to a detector.
/// Defaults are the as-built read-out chain.
struct DetectionChain {
  double t_oc = 0.20;         ///< output coupler transmittance, (0,1]
  double cavity_loss = 0.13;  ///< round-trip intracavity loss, [0,1)
  double eta_smf = 0.71;      ///< single-mode fibre coupling
  double eta_filter = 0.56;   ///< etalon filter set transmission
  double eta_mmf = 0.92;      ///< multimode fibre transmission
  double eta_d = 0.68;        ///< detector quantum efficiency

  void validate() const;

  static DetectionChain as_built() { return {}; }
  /// Lower cavity loss, better fibres and filters, superconducting detectors.
  static DetectionChain improved() { return {0.20, 0.01, 0.99, 0.99, 0.99, 0.95}; }

  bool operator==(const DetectionChain&) const = default;
};

/// Itemised contributions to the intracavity loss. Optional; when present the
/// items must sum to DetectionChain::cavity_loss within 1e-6.
struct LossBudget {
  struct Item {
    std::string name;
    double loss = 0.0;
    bool operator==(const Item&) const = default;
  };
  std::vector<Item> items;

  double total() const;
  void check_against(double cavity_loss) const;

  /// Beam splitters BS1/BS2, HR mirrors, intracavity optics and the per-arm
  /// escape loss of one interferometer arm.
  static LossBudget as_built();

  bool operator==(const LossBudget&) const = default;
};

/// Atomic cloud and the beam geometry that fixes the write/Stokes angle.
struct EnsembleGeometry {
  double wavelength = 795e-9;                   ///< m
  double temperature = 100e-6;                  ///< K
  double atomic_mass = 87.0 * kAtomicMassUnit;  ///< kg
  double bd_separation = 5.5e-3;                ///< m, arm separation D after the displacer
  double f_btd = 2.0;                           ///< beam-transformation shrink factor
  double f0 = 1.5;                              ///< m, lens focal length

  void validate() const;
  bool operator==(const EnsembleGeometry&) const = default;
};

/// Configuration of one simulated write/read experiment.
struct ExperimentParams {
  double chi = 0.01;       ///< excitation probability per write pulse
  double noise_b = 1e-5;   ///< Stokes background probability per pulse (B)
  double noise_c = 1e-4;   ///< anti-Stokes background probability per read (C)
  double eta_s = 0.15;     ///< overall Stokes detection efficiency
  double eta_as = 0.15;    ///< overall anti-Stokes detection efficiency
  double v0 = 2.5 / (2.0 * std::numbers::sqrt2);  ///< intrinsic pair visibility
  double phase = 0.0;      ///< phi_S + phi_AS, radians
  DecayParams decay;

  void validate() const;
  bool operator==(const ExperimentParams&) const = default;
};

/// Timing of the cyclic experiment: atom preparation followed by a run of
/// back-to-back write/read trials.
struct CycleTiming {
  double prep_duration = 42e-3;  ///< s
  double run_duration = 8e-3;    ///< s
  double trial_period = 2000e-9; ///< s, write-to-write delay
  double write_duration = 300e-9;
  double read_duration = 300e-9;
  double clean_duration = 200e-9;
  double interval = 1300e-9;

  void validate() const;
  double cycle_duration() const { return prep_duration + run_duration; }
  double cycles_per_second() const { return 1.0 / cycle_duration(); }
  std::uint64_t trials_per_run() const;

  bool operator==(const CycleTiming&) const = default;
};

/// T_OC / (T_OC + L).
double cavity_escape_efficiency(double t_oc, double cavity_loss);

/// Fibre, filter and multimode transmission between the cavity and detector.
double transmission_efficiency(const DetectionChain& chain);

/// eta_esp * eta_T * eta_D.
double total_detection_efficiency(const DetectionChain& chain);

/// Angle between each cavity arm and the write beam, D / (2 F_BTD F0), radians.
double coupling_angle(const EnsembleGeometry& geom);

/// Write attempts per second averaged over the preparation/run cycle.
double repetition_rate(const CycleTiming& timing);

inline double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }
inline double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

}  // namespace dlcz
