#include "dlcz/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "check.hpp"
#include "dlcz/rng.hpp"
#include "parallel.hpp"

namespace dlcz {

using detail::require;

namespace {

constexpr std::uint64_t kPoissonDomain = 0x706f6973736f6eULL;

template <typename Count>
double qubit_retrieval(const BasicCountsTable<Count>& c, double eta_td) {
  require(eta_td > 0.0 && eta_td <= 1.0, "eta_td must lie in (0,1]");
  require<InsufficientDataError>(c.n_pulses > 0, "counts table has no pulses");
  require<InsufficientDataError>(c.stokes_singles() > 0, "no Stokes singles (n_D1 + n_D2 = 0)");
  const double n = static_cast<double>(c.n_pulses);
  const double p_s_as = static_cast<double>(c.matched()) / n;
  const double p_s = static_cast<double>(c.stokes_singles()) / n;
  return p_s_as / (eta_td * p_s);
}

template <typename Count>
double mode_retrieval(const BasicCountsTable<Count>& c, SpinWaveMode mode, double eta_td) {
  require(eta_td > 0.0 && eta_td <= 1.0, "eta_td must lie in (0,1]");
  require<InsufficientDataError>(c.n_pulses > 0, "counts table has no pulses");
  const bool left = mode == SpinWaveMode::kL;
  const Count singles = left ? c.n_d1 : c.n_d2;
  const Count coinc = left ? c.c13 : c.c24;
  require<InsufficientDataError>(singles > 0, left ? "no D1 singles" : "no D2 singles");
  const double n = static_cast<double>(c.n_pulses);
  return (static_cast<double>(coinc) / n) / (eta_td * static_cast<double>(singles) / n);
}

template <typename Count>
double correlation(const BasicCountsTable<Count>& c) {
  const double total = static_cast<double>(c.coincidences());
  require<InsufficientDataError>(total > 0.0, "no coincidences at this setting");
  return (static_cast<double>(c.matched()) - static_cast<double>(c.crossed())) / total;
}

template <typename Table>
std::array<const Table*, 4> match_settings(std::span<const Table> tables,
                                           const BellSettings& settings) {
  settings.validate();
  std::array<const Table*, 4> found{};
  const auto combos = settings.combinations();
  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& t : tables) {
      if (t.settings.same_analysis(combos[i])) {
        found[i] = &t;
        break;
      }
    }
    require<InsufficientDataError>(
        found[i] != nullptr, "no counts table for CHSH setting " + std::to_string(i + 1) + " of 4");
  }
  return found;
}

template <typename Table>
std::array<double, 4> correlations_of(std::span<const Table> tables, const BellSettings& s) {
  const auto found = match_settings(tables, s);
  std::array<double, 4> e{};
  for (std::size_t i = 0; i < 4; ++i) e[i] = correlation(*found[i]);
  return e;
}

std::uint64_t poisson_draw(CounterRng& rng, std::uint64_t mean) {
  if (mean == 0) return 0;
  std::poisson_distribution<std::uint64_t> dist(static_cast<double>(mean));
  return dist(rng);
}

}  // namespace

void BellSettings::validate() const {
  require(std::isfinite(theta_s) && std::isfinite(theta_s_prime) && std::isfinite(theta_as) &&
              std::isfinite(theta_as_prime),
          "Bell angles must be finite");
  require(!AngleSettings{theta_s, 0}.same_analysis({theta_s_prime, 0}) &&
              !AngleSettings{0, theta_as}.same_analysis({0, theta_as_prime}),
          "Bell settings need two distinct Stokes and two distinct anti-Stokes angles");
}

std::array<AngleSettings, 4> BellSettings::combinations() const {
  return {AngleSettings{theta_s, theta_as}, AngleSettings{theta_s, theta_as_prime},
          AngleSettings{theta_s_prime, theta_as}, AngleSettings{theta_s_prime, theta_as_prime}};
}

double intrinsic_retrieval_qubit(const CountsTable& counts, double eta_td) {
  return qubit_retrieval(counts, eta_td);
}
double intrinsic_retrieval_qubit(const ExpectedCounts& counts, double eta_td) {
  return qubit_retrieval(counts, eta_td);
}

double intrinsic_retrieval_mode(const CountsTable& counts, SpinWaveMode mode, double eta_td) {
  return mode_retrieval(counts, mode, eta_td);
}
double intrinsic_retrieval_mode(const ExpectedCounts& counts, SpinWaveMode mode, double eta_td) {
  return mode_retrieval(counts, mode, eta_td);
}

CorrectedRetrieval retrieval_background_corrected(double p_s_as, double p_s, double p_as,
                                                  double noise_b, double eta_s, double eta_as) {
  require(eta_as > 0.0, "eta_aS must be positive");
  const double heralds = p_s - noise_b * eta_s;
  require(heralds > 0.0, "P_S does not exceed the Stokes background B eta_S");
  const double numerator = p_s_as - p_s * p_as;
  CorrectedRetrieval out;
  if (numerator < 0.0) {
    out.clamped = true;
    return out;
  }
  out.r_net = numerator / heralds;
  out.r_inc = out.r_net / eta_as;
  return out;
}

double correlation_E(const CountsTable& counts) { return correlation(counts); }
double correlation_E(const ExpectedCounts& counts) { return correlation(counts); }

double chsh_combination(const std::array<double, 4>& e) { return e[0] - e[1] + e[2] + e[3]; }

double BellResult::violation_sigmas() const {
  require<DegenerateStatisticsError>(s.sigma > 0.0, "S has zero spread");
  return (s.value - 2.0) / s.sigma;
}

BellResult bell_S(std::span<const CountsTable> tables, const BellSettings& settings, int replicas,
                  std::uint64_t seed, unsigned threads) {
  BellResult out;
  out.correlations = correlations_of(tables, settings);
  out.signed_s = chsh_combination(out.correlations);

  const auto found = match_settings(tables, settings);
  std::vector<CountsTable> ordered;
  for (const auto* t : found) ordered.push_back(*t);
  const auto s_of = [](std::span<const CountsTable> t) {
    return std::abs(chsh_combination(
        {correlation(t[0]), correlation(t[1]), correlation(t[2]), correlation(t[3])}));
  };
  out.s = poisson_error(s_of, ordered, replicas, seed, threads);
  return out;
}

double bell_S(std::span<const ExpectedCounts> tables, const BellSettings& settings) {
  return std::abs(chsh_combination(correlations_of(tables, settings)));
}

double visibility_from_S(double s) {
  require(s >= 0.0, "S must be non-negative");
  return s / (2.0 * std::numbers::sqrt2);
}

double fidelity_from_S(double s) { return (3.0 * visibility_from_S(s) + 1.0) / 4.0; }

EstimateWithError poisson_error(const CountsEstimator& estimator,
                                std::span<const CountsTable> counts, int n_replicas,
                                std::uint64_t seed, unsigned threads) {
  require(n_replicas >= 100, "poisson_error needs at least 100 replicas");
  EstimateWithError out;
  out.value = estimator(counts);

  const auto n = static_cast<std::uint64_t>(n_replicas);
  std::vector<double> values(n, 0.0);
  std::vector<char> ok(n, 0);
  detail::parallel_chunks(
      n, std::min<std::uint64_t>(n, 64), detail::resolve_threads(threads),
      [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        std::vector<CountsTable> replica(counts.begin(), counts.end());
        for (std::uint64_t r = begin; r < end; ++r) {
          CounterRng rng(seed, r, kPoissonDomain);
          for (std::size_t i = 0; i < counts.size(); ++i) {
            const auto& c = counts[i];
            auto& x = replica[i];
            x.n_d1 = poisson_draw(rng, c.n_d1);
            x.n_d2 = poisson_draw(rng, c.n_d2);
            x.c13 = poisson_draw(rng, c.c13);
            x.c24 = poisson_draw(rng, c.c24);
            x.c14 = poisson_draw(rng, c.c14);
            x.c23 = poisson_draw(rng, c.c23);
          }
          try {
            values[r] = estimator(replica);
            ok[r] = std::isfinite(values[r]) ? 1 : 0;
          } catch (const Error&) {
            ok[r] = 0;
          }
        }
      });

  std::uint64_t good = 0;
  double mean = 0.0;
  for (std::uint64_t r = 0; r < n; ++r) {
    if (!ok[r]) continue;
    ++good;
    mean += (values[r] - mean) / static_cast<double>(good);
  }
  require<DegenerateStatisticsError>(
      static_cast<double>(n - good) <= 0.01 * static_cast<double>(n),
      "estimator failed in more than 1% of Poisson replicas");
  double ss = 0.0;
  for (std::uint64_t r = 0; r < n; ++r) {
    if (ok[r]) ss += (values[r] - mean) * (values[r] - mean);
  }
  out.sigma = good > 1 ? std::sqrt(ss / static_cast<double>(good - 1)) : 0.0;
  return out;
}

}  // namespace dlcz
