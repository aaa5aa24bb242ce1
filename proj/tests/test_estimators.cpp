#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dlcz/errors.hpp"
#include "dlcz/estimators.hpp"
#include "dlcz/mc_engine.hpp"

using namespace dlcz;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

CountsTable table(std::uint64_t n, std::uint64_t d1, std::uint64_t d2, std::uint64_t c13,
                  std::uint64_t c24, std::uint64_t c14, std::uint64_t c23) {
  CountsTable t;
  t.n_pulses = n;
  t.n_d1 = d1;
  t.n_d2 = d2;
  t.c13 = c13;
  t.c24 = c24;
  t.c14 = c14;
  t.c23 = c23;
  return t;
}

std::vector<ExpectedCounts> model_tables(double v, double phase, const BellSettings& b = {}) {
  ExperimentParams p;
  p.v0 = v;
  p.phase = phase;
  p.noise_b = 0.0;
  p.noise_c = 0.0;
  std::vector<ExpectedCounts> out;
  for (const auto& s : b.combinations()) {
    out.push_back(expected_counts(p, 0.0, s, 1e9, CoincidenceModel::kFeedForward));
  }
  return out;
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("qubit retrieval from counts") {
  // c13 + c24 = 0.1155 (n_D1 + n_D2) with eta_TD = 0.15 gives 0.77.
  const auto t = table(10'000'000, 10000, 10000, 1155, 1155, 0, 0);
  CHECK(intrinsic_retrieval_qubit(t, 0.15) == Approx(0.77).epsilon(1e-12));
  CHECK(intrinsic_retrieval_qubit(table(1000, 10, 10, 0, 0, 0, 0), 0.15) == 0.0);
  CHECK_THROWS_AS(intrinsic_retrieval_qubit(table(1000, 0, 0, 0, 0, 0, 0), 0.15),
                  InsufficientDataError);
}

TEST_CASE("mode retrieval") {
  const auto balanced = table(1'000'000, 5000, 5000, 400, 400, 10, 10);
  const double q = intrinsic_retrieval_qubit(balanced, 0.15);
  CHECK(intrinsic_retrieval_mode(balanced, SpinWaveMode::kL, 0.15) == Approx(q).epsilon(1e-14));
  CHECK(intrinsic_retrieval_mode(balanced, SpinWaveMode::kR, 0.15) == Approx(q).epsilon(1e-14));
  CHECK_THROWS_AS(intrinsic_retrieval_mode(table(1000, 0, 10, 0, 1, 0, 0), SpinWaveMode::kL, 0.15),
                  InsufficientDataError);
}

TEST_CASE("qubit retrieval is the singles-weighted mean of the two modes") {
  // n_D1 = n_D2: the weights are equal, so R_qubit = (R_L + R_R) / 2.
  const auto t = table(1'000'000, 7000, 7000, 600, 300, 10, 10);
  const double r_l = intrinsic_retrieval_mode(t, SpinWaveMode::kL, 0.15);
  const double r_r = intrinsic_retrieval_mode(t, SpinWaveMode::kR, 0.15);
  CHECK(intrinsic_retrieval_qubit(t, 0.15) == Approx((r_l + r_r) / 2.0).epsilon(1e-14));
}

TEST_CASE("background-corrected retrieval") {
  ExperimentParams p;
  p.chi = 0.01;
  p.noise_b = 1e-5;
  p.noise_c = 1e-4;
  p.decay = {0.77, 1e-3};
  const auto f = forward_count_probs(p, 0.0, {0.0, 0.0}, CoincidenceModel::kSinglesProduct);
  const auto r = retrieval_background_corrected(f.p_s_as, f.p_s, f.p_as, 1e-5, 0.15, 0.15);
  CHECK(std::abs(r.r_inc - 0.77) < 1e-10);
  CHECK(r.r_net == Approx(0.77 * 0.15).epsilon(1e-10));
  CHECK_FALSE(r.clamped);

  // B = 0 and no accidentals: P_S,aS / (P_S eta_aS).
  const auto simple = retrieval_background_corrected(2e-5, 1e-3, 0.0, 0.0, 0.15, 0.15);
  CHECK(simple.r_inc == Approx(2e-5 / (1e-3 * 0.15)).epsilon(1e-14));

  CHECK_THROWS_AS(retrieval_background_corrected(1e-5, 1.5e-6, 1e-3, 1e-5, 0.15, 0.15),
                  DomainError);
  const auto neg = retrieval_background_corrected(1e-9, 1e-3, 1e-3, 0.0, 0.15, 0.15);
  CHECK(neg.clamped);
  CHECK(neg.r_inc == 0.0);
}

TEST_CASE("correlation function") {
  CHECK(correlation_E(table(100, 50, 50, 10, 10, 0, 0)) == 1.0);
  CHECK(correlation_E(table(100, 50, 50, 5, 5, 5, 5)) == 0.0);
  CHECK_THROWS_AS(correlation_E(table(100, 50, 50, 0, 0, 0, 0)), InsufficientDataError);

  ExpectedCounts e;
  const auto j = projection_probs({kPi / 8.0, 0.0}, 0.8839, 0.0);
  e.c13 = j.p13, e.c24 = j.p24, e.c14 = j.p14, e.c23 = j.p23;
  CHECK(correlation_E(e) == Approx(0.8839 * std::cos(kPi / 4.0)).epsilon(1e-12));
  CHECK(std::abs(correlation_E(e) - 0.625) < 1e-3);
}

TEST_CASE("correlation is bounded and scale invariant") {
  for (std::uint64_t a : {0u, 1u, 7u, 100u}) {
    for (std::uint64_t b : {0u, 3u, 50u}) {
      for (std::uint64_t c : {1u, 9u}) {
        const auto t = table(100000, 1000, 1000, a, b, c, a + 1);
        const double e = correlation_E(t);
        CHECK(e >= -1.0);
        CHECK(e <= 1.0);
        const auto k = table(1000000, 10000, 10000, 10 * a, 10 * b, 10 * c, 10 * (a + 1));
        CHECK(correlation_E(k) == Approx(e).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("CHSH parameter on model tables") {
  CHECK(bell_S(model_tables(1.0, 0.0)) == Approx(kTsirelson).epsilon(1e-12));
  CHECK(bell_S(model_tables(0.8839, 0.0)) == Approx(2.5).epsilon(2e-4));
  CHECK(bell_S(model_tables(0.7248, 0.0)) == Approx(2.05).epsilon(2e-4));
}

TEST_CASE("S = 2 sqrt2 V |cos phi| on model tables") {
  for (double v : {0.0, 0.25, 0.7248, 0.8839, 1.0}) {
    for (double phi : {0.0, 0.3, 1.2, 2.0, kPi}) {
      if (v * std::abs(std::cos(phi)) < 1e-6) continue;  // no coincidence contrast left
      CHECK(bell_S(model_tables(v, phi)) ==
            Approx(kTsirelson * v * std::abs(std::cos(phi))).epsilon(1e-12));
    }
  }
}

TEST_CASE("CHSH tables may come in any order") {
  auto t = model_tables(0.9, 0.0);
  std::swap(t[0], t[3]);
  std::swap(t[1], t[2]);
  CHECK(bell_S(t) == Approx(kTsirelson * 0.9).epsilon(1e-12));
  t.pop_back();
  CHECK_THROWS_AS(bell_S(t), InsufficientDataError);
}

TEST_CASE("visibility and fidelity") {
  CHECK(fidelity_from_S(1.15) == Approx(0.555).epsilon(0.001 / 0.555));
  CHECK(fidelity_from_S(1.15) >= 0.550);
  CHECK(fidelity_from_S(1.15) <= 0.560);
  CHECK(visibility_from_S(kTsirelson) == Approx(1.0).epsilon(1e-15));
  CHECK(fidelity_from_S(kTsirelson) == Approx(1.0).epsilon(1e-15));
  CHECK(visibility_from_S(2.5) == Approx(0.8839).epsilon(0.0005 / 0.8839));
  CHECK(fidelity_from_S(2.5) == Approx(0.913).epsilon(0.0005 / 0.913));
  CHECK(fidelity_from_S(0.0) == 0.25);
  // Affine and increasing.
  const double slope = fidelity_from_S(1.0) - fidelity_from_S(0.0);
  CHECK(slope > 0.0);
  for (double s : {0.3, 1.7, 2.2, 2.8}) {
    CHECK(fidelity_from_S(s) == Approx(0.25 + slope * s).epsilon(1e-14));
  }
  CHECK_THROWS_AS(visibility_from_S(-0.1), DomainError);
}

TEST_CASE("Poisson error bars") {
  const auto e_of = [](std::span<const CountsTable> t) { return correlation_E(t[0]); };
  const std::vector<CountsTable> small{table(1000, 100, 100, 30, 30, 10, 10)};
  const std::vector<CountsTable> large{table(100000, 10000, 10000, 3000, 3000, 1000, 1000)};
  const auto a = poisson_error(e_of, small, 10000, 42);
  const auto b = poisson_error(e_of, large, 10000, 42);
  CHECK(a.value == b.value);
  CHECK(a.sigma / b.sigma == Approx(10.0).epsilon(0.05));

  // Deterministic for a seed, whatever the thread count.
  const auto c = poisson_error(e_of, small, 10000, 42, 1);
  const auto d = poisson_error(e_of, small, 10000, 42, 3);
  CHECK(c.sigma == d.sigma);
  CHECK(c.sigma == a.sigma);

  CHECK_THROWS_AS(poisson_error(e_of, small, 99, 1), DomainError);
}

TEST_CASE("Poisson error of E against the delta method") {
  // E = (M - X)/(M + X) with M, X Poisson: var E = 4 M X (M + X) / (M + X)^4.
  const std::vector<CountsTable> c{table(10000, 500, 500, 40, 40, 10, 10)};
  const auto r = poisson_error([](auto t) { return correlation_E(t[0]); }, c, 10000, 7);
  const double m = 80.0, x = 20.0;
  const double analytic = std::sqrt(4.0 * m * x * (m + x)) / std::pow(m + x, 2);
  CHECK(r.sigma == Approx(analytic).epsilon(0.2));
}

TEST_CASE("Poisson error of E on (10, 10, 0, 0)") {
  // Every replica has E = 1 unless both counts vanish, which Poisson(10) makes rare.
  const std::vector<CountsTable> c{table(1000, 100, 100, 10, 10, 0, 0)};
  const auto r = poisson_error([](auto t) { return correlation_E(t[0]); }, c, 10000, 3);
  CHECK(r.value == 1.0);
  // The delta method gives zero spread when the crossed counts are zero.
  CHECK(r.sigma == 0.0);
}

TEST_CASE("frequent estimator failures are degenerate statistics") {
  const std::vector<CountsTable> c{table(1000, 10, 10, 0, 0, 1, 0)};
  CHECK_THROWS_AS(poisson_error([](auto t) { return correlation_E(t[0]); }, c, 1000, 5),
                  DegenerateStatisticsError);
}

TEST_CASE("estimators are invariant under scaling all counts") {
  auto base = table(1'000'000, 6000, 5000, 420, 380, 40, 30);
  base.settings = {0.0, 0.0};
  for (std::uint64_t k : {2u, 7u, 100u}) {
    auto s = table(k * 1'000'000, k * 6000, k * 5000, k * 420, k * 380, k * 40, k * 30);
    CHECK(intrinsic_retrieval_qubit(s, 0.15) ==
          Approx(intrinsic_retrieval_qubit(base, 0.15)).epsilon(1e-14));
    CHECK(intrinsic_retrieval_mode(s, SpinWaveMode::kR, 0.15) ==
          Approx(intrinsic_retrieval_mode(base, SpinWaveMode::kR, 0.15)).epsilon(1e-14));
    CHECK(correlation_E(s) == Approx(correlation_E(base)).epsilon(1e-14));
  }
}

TEST_CASE("Bell result on simulated counts reports sigma and violation") {
  ExperimentParams p;
  p.chi = 0.02;
  const BellSettings b;
  const auto c = b.combinations();
  const std::vector<AngleSettings> angles(c.begin(), c.end());
  const auto res = run_experiment(p, CycleTiming{}, 0.0, angles, 2'000'000, 31);
  const auto r = bell_S(res.tables, b, 2000, 9);
  CHECK(r.s.value == Approx(std::abs(r.signed_s)).epsilon(1e-15));
  CHECK(r.s.sigma > 0.0);
  CHECK(r.violation_sigmas() == Approx((r.s.value - 2.0) / r.s.sigma).epsilon(1e-14));
}

TEST_CASE("Bell settings validation") {
  CHECK_NOTHROW(BellSettings{}.validate());
  CHECK_THROWS_AS((BellSettings{0.0, kPi, 0.1, 0.2}.validate()), DomainError);
}

}  // TEST_SUITE
