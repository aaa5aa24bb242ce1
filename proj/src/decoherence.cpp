#include "dlcz/decoherence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "check.hpp"

namespace dlcz {

using detail::positive;
using detail::require;

double retrieval_decay(const DecayParams& p, double t) {
  require(positive(p.tau0), "tau0 must be positive");
  require(std::isfinite(t) && t >= 0.0, "storage time must be non-negative");
  const double x = t / p.tau0;
  return p.r0 * (std::exp(-x * x) + std::exp(-x)) / 2.0;
}

double motional_lifetime(double wavelength, double temperature, double atomic_mass, double angle) {
  require(positive(wavelength) && positive(temperature) && positive(atomic_mass) && positive(angle),
          "lifetime needs positive wavelength, temperature, mass and angle");
  const double k = 2.0 * std::numbers::pi / wavelength;
  const double dk = 2.0 * k * std::sin(angle / 2.0);
  const double v_a = std::sqrt(kBoltzmann * temperature / atomic_mass);
  return 1.0 / (dk * v_a);
}

double motional_lifetime(const EnsembleGeometry& geom) {
  geom.validate();
  return motional_lifetime(geom.wavelength, geom.temperature, geom.atomic_mass,
                           coupling_angle(geom));
}

namespace {

using Point = std::array<double, 2>;  // (R0, ln tau0)

class Objective {
 public:
  Objective(std::span<const DecaySample> samples, bool weighted)
      : samples_(samples), weighted_(weighted) {}

  double operator()(const Point& x) const {
    const double r0 = x[0];
    if (!(r0 >= 0.0 && r0 <= 1.0) || !std::isfinite(x[1])) {
      return std::numeric_limits<double>::infinity();
    }
    const double tau0 = std::exp(x[1]);
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& s : samples_) {
      const double u = s.t / tau0;
      const double model = r0 * (std::exp(-u * u) + std::exp(-u)) / 2.0;
      const double d = model - s.r;
      sum += weighted_ ? d * d / (s.sigma * s.sigma) : d * d;
    }
    return sum;
  }

 private:
  std::span<const DecaySample> samples_;
  bool weighted_;
};

struct SimplexResult {
  Point best;
  double value;
  int iterations;
  bool converged;
};

SimplexResult nelder_mead(const Objective& f, const Point& start, const Point& step,
                          int max_iterations, double rel_tol) {
  std::array<Point, 3> v{start, start, start};
  v[1][0] += step[0];
  v[2][1] += step[1];
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};

  int it = 0;
  for (; it < max_iterations; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int lo = order[0], mid = order[1], hi = order[2];

    const double spread = fv[hi] - fv[lo];
    const double size = std::max({std::abs(v[hi][0] - v[lo][0]), std::abs(v[hi][1] - v[lo][1]),
                                  std::abs(v[mid][0] - v[lo][0]), std::abs(v[mid][1] - v[lo][1])});
    if (std::isfinite(fv[hi]) &&
        (spread <= rel_tol * std::abs(fv[lo]) || spread <= std::numeric_limits<double>::min() ||
         size <= 1e-15 * (1.0 + std::abs(v[lo][1])))) {
      return {v[lo], fv[lo], it, true};
    }

    const Point centroid{(v[lo][0] + v[mid][0]) / 2.0, (v[lo][1] + v[mid][1]) / 2.0};
    auto along = [&](double coef) {
      return Point{centroid[0] + coef * (v[hi][0] - centroid[0]),
                   centroid[1] + coef * (v[hi][1] - centroid[1])};
    };

    const Point xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[lo]) {
      const Point xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        v[hi] = xe, fv[hi] = fe;
      } else {
        v[hi] = xr, fv[hi] = fr;
      }
      continue;
    }
    if (fr < fv[mid]) {
      v[hi] = xr, fv[hi] = fr;
      continue;
    }
    const bool outside = fr < fv[hi];
    const Point xc = along(outside ? -0.5 : 0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[hi])) {
      v[hi] = xc, fv[hi] = fc;
      continue;
    }
    for (int k : {mid, hi}) {
      v[k] = Point{v[lo][0] + 0.5 * (v[k][0] - v[lo][0]), v[lo][1] + 0.5 * (v[k][1] - v[lo][1])};
      fv[k] = f(v[k]);
    }
  }
  const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  return {v[best], fv[best], it, false};
}

}  // namespace

DecayFit fit_decay(std::span<const DecaySample> samples, const DecayFitOptions& options) {
  require<FitError>(samples.size() >= 3, "decay fit needs at least 3 samples");

  std::size_t with_sigma = 0;
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -t_min;
  double r_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    require(std::isfinite(s.t) && s.t >= 0.0, "sample storage times must be non-negative");
    require(std::isfinite(s.r), "sample efficiencies must be finite");
    require(!(s.sigma < 0.0), "sample sigma must not be negative");
    if (s.sigma > 0.0) ++with_sigma;
    t_min = std::min(t_min, s.t);
    t_max = std::max(t_max, s.t);
    r_max = std::max(r_max, s.r);
  }
  require(with_sigma == 0 || with_sigma == samples.size(),
          "either every sample carries sigma or none does");
  require<FitError>(t_max > t_min, "decay fit needs distinct storage times");
  {
    std::vector<double> ts;
    for (const auto& s : samples) ts.push_back(s.t);
    std::sort(ts.begin(), ts.end());
    require<FitError>(std::unique(ts.begin(), ts.end()) - ts.begin() >= 2,
                      "decay fit needs distinct storage times");
  }

  const bool weighted = with_sigma == samples.size();
  const Objective f(samples, weighted);

  // Coarse grid seed; ties go to the smaller tau0 because tau0 ascends.
  const double r_lo = std::clamp(r_max, 0.0, 1.0);
  constexpr int kRSteps = 21;
  constexpr int kTauSteps = 41;
  Point seed{r_lo, std::log(t_max)};
  double seed_value = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kTauSteps; ++j) {
    const double log_tau = std::log(t_max / 10.0) + std::log(100.0) * j / (kTauSteps - 1);
    for (int i = 0; i < kRSteps; ++i) {
      const Point x{r_lo + (1.0 - r_lo) * i / (kRSteps - 1), log_tau};
      const double value = f(x);
      if (value < seed_value) seed = x, seed_value = value;
    }
  }

  // Restart from the optimum until a fresh simplex no longer improves it.
  int total = 0;
  SimplexResult result{seed, seed_value, 0, false};
  for (int round = 0; round < 8; ++round) {
    const Point step{0.05 * std::max(result.best[0], 0.1), 0.1};
    const auto next = nelder_mead(f, result.best, step, options.max_iterations - total,
                                  options.rel_tolerance);
    total += next.iterations;
    if (!next.converged) {
      throw FitError("decay fit did not converge within " +
                     std::to_string(options.max_iterations) + " iterations");
    }
    const bool improved =
        next.value < result.value - options.rel_tolerance * std::abs(result.value);
    result = next.value <= result.value ? next : result;
    result.converged = true;
    if (!improved && round > 0) break;
  }

  DecayFit fit;
  fit.params = {result.best[0], std::exp(result.best[1])};
  fit.residual = result.value;
  fit.iterations = total;
  fit.weighted = weighted;

  // Curvature of the sum of squares in (R0, tau0).
  double a = 0.0, b = 0.0, c = 0.0;
  const double r0 = fit.params.r0, tau0 = fit.params.tau0;
  for (const auto& s : samples) {
    const double u = s.t / tau0;
    const double g = std::exp(-u * u), e = std::exp(-u);
    const double d_r0 = (g + e) / 2.0;
    const double d_tau = r0 / 2.0 * (2.0 * u * u * g + u * e) / tau0;
    const double w = weighted ? 1.0 / (s.sigma * s.sigma) : 1.0;
    a += w * d_r0 * d_r0;
    b += w * d_r0 * d_tau;
    c += w * d_tau * d_tau;
  }
  const double det = a * c - b * b;
  const double scale =
      weighted ? 1.0 : (samples.size() > 2 ? fit.residual / double(samples.size() - 2) : 0.0);
  if (det > 1e-12 * a * c) {
    fit.r0_sigma = std::sqrt(scale * c / det);
    fit.tau0_sigma = std::sqrt(scale * a / det);
  } else {
    fit.r0_sigma = fit.tau0_sigma = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

}  // namespace dlcz
