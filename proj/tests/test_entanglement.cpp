#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dlcz/entanglement.hpp"
#include "dlcz/errors.hpp"

using namespace dlcz;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentParams operating_point() {
  ExperimentParams p;
  p.chi = 0.01;
  p.noise_b = 1e-5;
  p.noise_c = 1e-4;
  p.eta_s = 0.15;
  p.eta_as = 0.15;
  p.decay = {0.77, 1e-3};
  return p;
}

}  // namespace

TEST_SUITE("entanglement") {

TEST_CASE("projection probabilities") {
  auto p = projection_probs({0.0, 0.0}, 1.0, 0.0);
  CHECK(p.p13 == Approx(0.5));
  CHECK(p.p24 == Approx(0.5));
  CHECK(p.p14 == Approx(0.0));
  CHECK(p.p23 == Approx(0.0));

  p = projection_probs({kPi / 4.0, 0.0}, 1.0, 0.0);
  for (double x : {p.p13, p.p24, p.p14, p.p23}) CHECK(x == Approx(0.25).epsilon(1e-14));

  p = projection_probs({kPi / 8.0, 0.0}, 0.8839, 0.0);
  CHECK(p.p13 == Approx((1.0 + 0.8839 * std::cos(kPi / 4.0)) / 4.0).epsilon(1e-14));
  CHECK(std::abs(p.p13 - 0.4063) < 5e-5);

  CHECK_THROWS_AS(projection_probs({0.0, 0.0}, 1.2, 0.0), DomainError);
}

TEST_CASE("projection invariants over a grid") {
  for (double ts = -1.0; ts < 4.0; ts += 0.37) {
    for (double tas = -2.0; tas < 3.0; tas += 0.41) {
      for (double v : {0.0, 0.3, 0.8839, 1.0}) {
        for (double phi : {0.0, 0.4, kPi / 2.0, 2.5}) {
          const auto p = projection_probs({ts, tas}, v, phi);
          CHECK(p.p13 + p.p24 + p.p14 + p.p23 == Approx(1.0).epsilon(1e-12));
          CHECK(p.p13 == p.p24);
          CHECK(p.p14 == p.p23);
          for (double x : {p.p13, p.p14}) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
          }
          const double e = v * std::cos(phi) * std::cos(2.0 * (ts - tas));
          CHECK(p.correlation() == Approx(e).epsilon(1e-12));
          CHECK(std::abs(p.correlation()) <= v + 1e-15);

          const auto rot = projection_probs({ts + kPi / 2.0, tas + kPi / 2.0}, v, phi);
          CHECK(rot.p13 == Approx(p.p13).epsilon(1e-12));
          CHECK(rot.p14 == Approx(p.p14).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("analyzer angles are periodic in pi") {
  const AngleSettings a{0.3, 1.1};
  CHECK(a.same_analysis({0.3 + kPi, 1.1 - 2.0 * kPi}));
  CHECK_FALSE(a.same_analysis({0.3 + kPi / 2.0, 1.1}));
}

TEST_CASE("forward model without excitation or noise") {
  auto p = operating_point();
  p.chi = 0.0;
  p.noise_b = 0.0;
  const auto f = forward_count_probs(p, 0.0, {0.0, 0.0});
  CHECK(f.p_s == 0.0);
  CHECK(f.p_s_as == 0.0);
}

TEST_CASE("forward model at the operating point without background") {
  auto p = operating_point();
  p.noise_b = 0.0;
  p.noise_c = 0.0;
  const auto f = forward_count_probs(p, 0.0, {0.0, 0.0});
  CHECK(f.p_s == Approx(1.5e-3).epsilon(1e-14));
  const double correlated = 0.01 * 0.77 * 0.15 * 0.15;
  CHECK(correlated == Approx(1.7325e-4).epsilon(1e-12));
  const double p_as = 0.01 * 0.77 * 0.15;
  CHECK(f.p_as == Approx(p_as).epsilon(1e-14));
  CHECK(f.p_s_as == Approx(correlated + 1.5e-3 * p_as).epsilon(1e-14));
}

TEST_CASE("forward model with background keeps both anti-Stokes terms") {
  const auto p = operating_point();
  const auto f = forward_count_probs(p, 0.0, {0.0, 0.0});
  CHECK(f.p_as == Approx(0.01 * 0.77 * 0.15 + 1e-4 * 0.15).epsilon(1e-14));
  CHECK(f.p_s == Approx(0.01 * 0.15 + 1e-5 * 0.15).epsilon(1e-14));
  CHECK(f.retrieval == 0.77);
}

TEST_CASE("detector-pair probabilities sum to the unresolved coincidence probability") {
  const auto p = operating_point();
  for (auto model : {CoincidenceModel::kSinglesProduct, CoincidenceModel::kFeedForward}) {
    for (double t : {0.0, 2e-4, 1e-3}) {
      for (double d : {0.0, kPi / 8.0, kPi / 4.0, 1.0}) {
        const auto f = forward_count_probs(p, t, {d, 0.0}, model);
        CHECK(f.p13 + f.p24 + f.p14 + f.p23 == Approx(f.p_s_as).epsilon(1e-12));
        CHECK(f.p_d1 + f.p_d2 == Approx(f.p_s).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("feed-forward accidentals use only anti-Stokes background") {
  const auto p = operating_point();
  const auto f = forward_count_probs(p, 0.0, {0.0, 0.0}, CoincidenceModel::kFeedForward);
  CHECK(f.p_s_as == Approx(0.01 * 0.77 * 0.0225 + f.p_s * 1e-4 * 0.15).epsilon(1e-14));
}

TEST_CASE("accidentals vanish relative to the correlated term as chi -> 0") {
  auto p = operating_point();
  p.noise_b = 0.0;
  p.noise_c = 0.0;
  for (double chi : {1e-2, 1e-3, 1e-4, 1e-5}) {
    p.chi = chi;
    const auto f = forward_count_probs(p, 0.0, {0.0, 0.0});
    const double correlated = chi * 0.77 * 0.0225;
    const double ratio = (f.p_s_as - correlated) / correlated;
    // P_S P_aS / (chi R eta_S eta_aS) = chi exactly in this limit.
    CHECK(ratio == Approx(chi).epsilon(1e-9));
  }
}

TEST_CASE("forward model rejects out-of-range inputs") {
  auto p = operating_point();
  CHECK_THROWS_AS(forward_count_probs(p, -1e-6, {0.0, 0.0}), DomainError);
  p.chi = 1.5;
  CHECK_THROWS_AS(forward_count_probs(p, 0.0, {0.0, 0.0}), DomainError);
}

}  // TEST_SUITE
