#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dlcz/decoherence.hpp"
#include "dlcz/errors.hpp"

using namespace dlcz;
using doctest::Approx;

namespace {

// Independent closed form of the decay curve.
double oracle_r(double r0, double tau0, double t) {
  return r0 * 0.5 * (std::exp(-std::pow(t / tau0, 2)) + std::exp(-t / tau0));
}

std::vector<DecaySample> exact_samples(DecayParams p, int n, double t_max) {
  std::vector<DecaySample> s;
  for (int i = 0; i < n; ++i) {
    const double t = t_max * i / (n - 1);
    s.push_back({t, oracle_r(p.r0, p.tau0, t), 0.0});
  }
  return s;
}

}  // namespace

TEST_SUITE("decoherence") {

TEST_CASE("decay curve values") {
  const DecayParams p{0.77, 1e-3};
  CHECK(retrieval_decay(p, 0.0) == 0.77);
  CHECK(retrieval_decay(p, 0.54e-3) == Approx(oracle_r(0.77, 1e-3, 0.54e-3)).epsilon(1e-14));
  CHECK(std::abs(retrieval_decay(p, 0.54e-3) - 0.512) < 5e-4);
  CHECK(std::abs(retrieval_decay(p, 0.23e-3) - 0.671) < 5e-4);
  CHECK(retrieval_decay({0.3, 5.0}, 0.0) == 0.3);
}

TEST_CASE("decay curve invariants") {
  for (double r0 : {0.1, 0.5, 0.77, 1.0}) {
    for (double tau0 : {1e-4, 1e-3, 16.0}) {
      const DecayParams p{r0, tau0};
      CHECK(retrieval_decay(p, tau0) == Approx(r0 / std::exp(1.0)).epsilon(1e-14));
      double prev = retrieval_decay(p, 0.0);
      for (int i = 1; i <= 50; ++i) {
        const double r = retrieval_decay(p, tau0 * i / 10.0);
        CHECK(r < prev);
        CHECK(r >= 0.0);
        prev = r;
      }
    }
  }
}

TEST_CASE("decay domain errors") {
  CHECK_THROWS_AS(retrieval_decay({0.77, 1e-3}, -1e-6), DomainError);
  CHECK_THROWS_AS(retrieval_decay({0.77, 0.0}, 1e-6), DomainError);
  CHECK_THROWS_AS(retrieval_decay({0.77, -1.0}, 1e-6), DomainError);
}

TEST_CASE("motional lifetime") {
  const EnsembleGeometry g;
  const double tau = motional_lifetime(g);
  CHECK(std::abs(tau - 1.4e-3) <= 0.1e-3);

  // Hand evaluation of 1 / (2 k sin(theta/2) sqrt(kT/m)).
  const double theta = 5.5e-3 / 6.0;
  const double k = 2.0 * M_PI / 795e-9;
  const double v = std::sqrt(1.380649e-23 * 100e-6 / (87.0 * 1.66053906660e-27));
  CHECK(tau == Approx(1.0 / (2.0 * k * std::sin(theta / 2.0) * v)).epsilon(1e-12));

  const double doubled = motional_lifetime(795e-9, 100e-6, 87.0 * kAtomicMassUnit, 2.0 * theta);
  CHECK(doubled == Approx(tau / 2.0).epsilon(1e-6));
  CHECK(std::abs(doubled - 0.70e-3) < 0.01e-3);

  CHECK_THROWS_AS(motional_lifetime(795e-9, 0.0, 1e-25, 1e-3), DomainError);
  CHECK_THROWS_AS(motional_lifetime(795e-9, 1e-4, 1e-25, 0.0), DomainError);
}

TEST_CASE("lifetime is unchanged by T -> 4T with theta -> theta/2") {
  const double m = 87.0 * kAtomicMassUnit;
  for (double theta : {1e-4, 9.17e-4, 3e-3}) {
    const double a = motional_lifetime(795e-9, 100e-6, m, theta);
    const double b = motional_lifetime(795e-9, 400e-6, m, theta / 2.0);
    CHECK(b == Approx(a).epsilon(1e-6));
  }
}

TEST_CASE("fit of the three quoted points") {
  const std::vector<DecaySample> s{{0.0, 0.77, 0.0}, {0.23e-3, 0.667, 0.0}, {0.54e-3, 0.50, 0.0}};
  const auto fit = fit_decay(s);
  CHECK(std::abs(fit.params.r0 - 0.77) <= 0.03);
  CHECK(std::abs(fit.params.tau0 - 1.0e-3) <= 0.15e-3);
  CHECK_FALSE(fit.weighted);
}

TEST_CASE("fit recovers noiseless model data") {
  const DecayParams truth{0.5, 2e-3};
  const auto fit = fit_decay(exact_samples(truth, 12, 6e-3));
  CHECK(fit.params.r0 == Approx(0.5).epsilon(1e-6));
  CHECK(fit.params.tau0 == Approx(2e-3).epsilon(1e-6));
  CHECK(fit.residual < 1e-20);
}

TEST_CASE("fit with 1% Gaussian noise") {
  const DecayParams truth{0.6, 1.5e-3};
  std::mt19937_64 gen(20240611);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<DecaySample> s;
  for (int i = 0; i < 20; ++i) {
    const double t = 3.0 * truth.tau0 * i / 19.0;
    const double r = oracle_r(truth.r0, truth.tau0, t);
    s.push_back({t, r * (1.0 + 0.01 * noise(gen)), 0.01 * r});
  }
  const auto fit = fit_decay(s);
  CHECK(fit.weighted);
  CHECK(std::abs(fit.params.r0 / truth.r0 - 1.0) < 0.03);
  CHECK(std::abs(fit.params.tau0 / truth.tau0 - 1.0) < 0.03);
  CHECK(fit.r0_sigma > 0.0);
  CHECK(fit.tau0_sigma > 0.0);
  // Parameter errors of a 20-point, 1% fit are well below 3%.
  CHECK(fit.r0_sigma < 0.03 * truth.r0);
}

TEST_CASE("refitting the fitted curve is idempotent") {
  const std::vector<DecaySample> s{{0.0, 0.77, 0.0}, {0.23e-3, 0.667, 0.0}, {0.54e-3, 0.50, 0.0},
                                   {0.9e-3, 0.31, 0.0}};
  const auto first = fit_decay(s);
  std::vector<DecaySample> again;
  for (const auto& x : s) again.push_back({x.t, retrieval_decay(first.params, x.t), 0.0});
  const auto second = fit_decay(again);
  CHECK(second.params.r0 == Approx(first.params.r0).epsilon(1e-9));
  CHECK(second.params.tau0 == Approx(first.params.tau0).epsilon(1e-9));
}

TEST_CASE("fit error cases") {
  CHECK_THROWS_AS(fit_decay(std::vector<DecaySample>{{0.0, 0.7, 0.0}, {1e-3, 0.3, 0.0}}), FitError);
  CHECK_THROWS_AS(
      fit_decay(std::vector<DecaySample>{{1e-3, 0.7, 0.0}, {1e-3, 0.6, 0.0}, {1e-3, 0.5, 0.0}}),
      FitError);
  CHECK_THROWS_AS(
      fit_decay(std::vector<DecaySample>{{0.0, 0.7, 0.01}, {1e-3, 0.6, 0.0}, {2e-3, 0.5, 0.01}}),
      DomainError);
  DecayFitOptions tight;
  tight.max_iterations = 3;
  CHECK_THROWS_AS(fit_decay(exact_samples({0.5, 2e-3}, 8, 6e-3), tight), FitError);
}

}  // TEST_SUITE
