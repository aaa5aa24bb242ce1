#pragma once

#include "dlcz/params.hpp"

namespace dlcz {

/// Half-wave-plate analysis angles before the Stokes and anti-Stokes PBS,
/// radians. Analyzers are periodic in pi.
struct AngleSettings {
  double theta_s = 0.0;
  double theta_as = 0.0;

  bool same_analysis(const AngleSettings& other, double tol = 1e-9) const;
  bool operator==(const AngleSettings&) const = default;
};

/// Detector-pair outcome distribution conditioned on a detected pair.
/// D1/D2 are the Stokes PBS outputs, D3/D4 the anti-Stokes ones.
struct JointOutcomeProbs {
  double p13 = 0.0;
  double p24 = 0.0;
  double p14 = 0.0;
  double p23 = 0.0;

  double correlation() const { return p13 + p24 - p14 - p23; }
};

/// Polarization statistics of (|HH> + e^{i phi}|VV>)/sqrt2 mixed with white
/// noise of weight 1 - V: p13 = p24 = (1 + V cos(phi) cos 2(theta_s -
/// theta_as)) / 4 and p14 = p23 = (1 - ...) / 4.
JointOutcomeProbs projection_probs(const AngleSettings& angles, double visibility, double phase);

/// What sits in the accidental coincidence term.
enum class CoincidenceModel {
  /// P_S,aS = chi R eta_S eta_aS + P_S P_aS, the usual DLCZ counting relation.
  kSinglesProduct,
  /// P_S,aS = chi R eta_S eta_aS + P_S C eta_aS: reads fire only after a
  /// Stokes click, so the only uncorrelated anti-Stokes clicks are background.
  /// This is what the trial-level engine realises in expectation.
  kFeedForward,
};

/// Per-write-pulse detection probabilities.
struct ForwardProbs {
  double retrieval = 0.0;  ///< R(t) used
  double p_s = 0.0;        ///< P_S
  double p_as = 0.0;       ///< P_aS
  double p_s_as = 0.0;     ///< P_S,aS, all detector pairs
  double p_d1 = 0.0;
  double p_d2 = 0.0;
  double p13 = 0.0;
  double p24 = 0.0;
  double p14 = 0.0;
  double p23 = 0.0;
};

/// Singles and coincidence probabilities per write pulse at storage time t.
/// Correlated pairs are apportioned by projection_probs with params.v0 and
/// params.phase; accidentals and singles split evenly over detectors. Throws
/// DomainError if any probability leaves [0,1].
ForwardProbs forward_count_probs(const ExperimentParams& params, double t,
                                 const AngleSettings& angles,
                                 CoincidenceModel model = CoincidenceModel::kSinglesProduct);

}  // namespace dlcz
