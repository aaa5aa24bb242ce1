#pragma once

#include <span>

#include "dlcz/params.hpp"

namespace dlcz {

/// One measured retrieval efficiency. sigma <= 0 means "no error bar".
struct DecaySample {
  double t = 0.0;      ///< storage time, s
  double r = 0.0;      ///< retrieval efficiency
  double sigma = 0.0;  ///< 1 s.d. of r
};

struct DecayFit {
  DecayParams params;
  double residual = 0.0;  ///< minimised (weighted) sum of squares
  int iterations = 0;
  bool weighted = false;
  /// Standard errors from the linearised covariance at the optimum:
  /// (J^T W J)^-1 when weighted, else s^2 (J^T J)^-1 with s^2 = residual / (n - 2).
  /// NaN when the curvature matrix is singular.
  double r0_sigma = 0.0;
  double tau0_sigma = 0.0;
};

struct DecayFitOptions {
  int max_iterations = 10000;
  double rel_tolerance = 1e-12;
};

/// R(t) = R0 (exp(-t^2/tau0^2) + exp(-t/tau0)) / 2.
///
/// The Gaussian term models motional dephasing and the exponential term the
/// remaining loss; both equal 1 at t = 0 and e^-1 at t = tau0.
double retrieval_decay(const DecayParams& p, double t);

/// Spin-wave lifetime limited by thermal atomic motion, 1 / (|dk| v_a) with
/// |dk| = 2 (2 pi / lambda) sin(theta / 2) and v_a = sqrt(k_B T / m).
double motional_lifetime(double wavelength, double temperature, double atomic_mass, double angle);

/// Same, with the angle taken from coupling_angle(geom).
double motional_lifetime(const EnsembleGeometry& geom);

/// Least-squares fit of (R0, tau0) to measured samples.
///
/// Samples carrying sigma > 0 are weighted by 1/sigma^2; all samples must
/// either carry an error bar or none. The minimiser is a Nelder-Mead simplex
/// over (R0, ln tau0), started from the best node of a coarse grid
/// R0 in [max r, 1] x tau0 in [t_max/10, 10 t_max]. Throws FitError when the
/// data are degenerate or the simplex has not converged after
/// options.max_iterations steps.
DecayFit fit_decay(std::span<const DecaySample> samples, const DecayFitOptions& options = {});

}  // namespace dlcz
