#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>

#include "dlcz/counts.hpp"

namespace dlcz {

struct EstimateWithError {
  double value = 0.0;
  double sigma = 0.0;  ///< 1 s.d.
};

/// Analyzer angles of a CHSH measurement, radians. Defaults are the canonical
/// 0, 45, 22.5 and 67.5 degrees.
struct BellSettings {
  double theta_s = 0.0;
  double theta_s_prime = std::numbers::pi / 4.0;
  double theta_as = std::numbers::pi / 8.0;
  double theta_as_prime = 3.0 * std::numbers::pi / 8.0;

  void validate() const;

  /// (s, as), (s, as'), (s', as), (s', as'): the order of the CHSH sum.
  std::array<AngleSettings, 4> combinations() const;

  bool operator==(const BellSettings&) const = default;
};

enum class SpinWaveMode { kL, kR };

/// R = P_S,AS / (eta_TD P_S) from matched coincidences at theta_S =
/// theta_AS = 0. Throws InsufficientDataError without Stokes singles.
double intrinsic_retrieval_qubit(const CountsTable& counts, double eta_td);
double intrinsic_retrieval_qubit(const ExpectedCounts& counts, double eta_td);

/// Single spin-wave efficiency: L uses D1/D3, R uses D2/D4.
double intrinsic_retrieval_mode(const CountsTable& counts, SpinWaveMode mode, double eta_td);
double intrinsic_retrieval_mode(const ExpectedCounts& counts, SpinWaveMode mode, double eta_td);

struct CorrectedRetrieval {
  double r_inc = 0.0;     ///< intrinsic efficiency
  double r_net = 0.0;     ///< r_inc * eta_aS
  bool clamped = false;   ///< accidental subtraction went negative; reported as 0
};

/// Background- and accidental-corrected retrieval:
/// R_inc = (P_S,aS - P_S P_aS) / ((P_S - B eta_S) eta_aS).
CorrectedRetrieval retrieval_background_corrected(double p_s_as, double p_s, double p_as,
                                                  double noise_b, double eta_s, double eta_as);

/// (C13 + C24 - C14 - C23) / (C13 + C24 + C14 + C23).
double correlation_E(const CountsTable& counts);
double correlation_E(const ExpectedCounts& counts);

/// E(s,as) - E(s,as') + E(s',as) + E(s',as'), without the absolute value.
double chsh_combination(const std::array<double, 4>& correlations);

struct BellResult {
  EstimateWithError s;                   ///< |combination| with Poisson error
  double signed_s = 0.0;
  std::array<double, 4> correlations{};  ///< in BellSettings::combinations() order

  /// (S - 2) / sigma.
  double violation_sigmas() const;
};

/// CHSH parameter from the four tables matching settings.combinations()
/// (any order in `tables`). Sigma from poisson_error with the given replica
/// count and seed.
BellResult bell_S(std::span<const CountsTable> tables, const BellSettings& settings = {},
                  int replicas = 10000, std::uint64_t seed = 0, unsigned threads = 0);

/// Noise-free S of expectation tables.
double bell_S(std::span<const ExpectedCounts> tables, const BellSettings& settings = {});

/// V = S / 2 sqrt2.
double visibility_from_S(double s);
/// F = (3 V + 1) / 4 with V = S / 2 sqrt2.
double fidelity_from_S(double s);

using CountsEstimator = std::function<double(std::span<const CountsTable>)>;

/// Point estimate on the observed counts, and the standard deviation of the
/// estimator over n_replicas Poisson resamplings of every count (pulse
/// totals held fixed). Replica r draws from CounterRng(seed, r), so the
/// result does not depend on `threads`. Replicas where the estimator throws
/// are dropped; more than 1% of them raises DegenerateStatisticsError.
EstimateWithError poisson_error(const CountsEstimator& estimator,
                                std::span<const CountsTable> counts, int n_replicas = 10000,
                                std::uint64_t seed = 0, unsigned threads = 0);

}  // namespace dlcz
