#include "dlcz/repeater.hpp"

#include <cmath>
#include <limits>

#include "check.hpp"
#include "parallel.hpp"

namespace dlcz {

using detail::in_half_open_unit;
using detail::positive;
using detail::require;

namespace {

constexpr double kDecayGuard = 700.0;

}  // namespace

std::string to_string(LinkDivisor d) {
  return d == LinkDivisor::kPowerOfTwo ? "power_of_two" : "nest_level";
}

LinkDivisor link_divisor_from_string(const std::string& s) {
  if (s == "power_of_two") return LinkDivisor::kPowerOfTwo;
  if (s == "nest_level") return LinkDivisor::kNestLevel;
  throw ConfigError("link divisor must be 'power_of_two' or 'nest_level', got '" + s + "'");
}

void RepeaterParams::validate() const {
  require(nest_level >= 0 && nest_level <= 30, "repeater.nest_level must lie in [0,30]");
  require(modes >= 1, "repeater.modes must be at least 1");
  require(positive(distance) && std::isfinite(distance), "repeater.distance must be positive");
  require(positive(attenuation_length), "repeater.attenuation_length must be positive");
  require(positive(fiber_speed) && std::isfinite(fiber_speed),
          "repeater.fiber_speed must be positive");
  require(in_half_open_unit(chi), "repeater.chi must lie in (0,1]");
  require(in_half_open_unit(eta_fc), "repeater.eta_fc must lie in (0,1]");
  require(in_half_open_unit(eta_td), "repeater.eta_td must lie in (0,1]");
  require(in_half_open_unit(r0), "repeater.r0 must lie in (0,1]");
  require(positive(tau0), "repeater.tau0 must be positive");
  require(link_divisor == LinkDivisor::kPowerOfTwo || nest_level > 0,
          "L0 = L / n needs nest_level > 0");
}

double RepeaterParams::links() const {
  return link_divisor == LinkDivisor::kPowerOfTwo ? std::ldexp(1.0, nest_level)
                                                  : static_cast<double>(nest_level);
}

ElementaryProbs elementary_probs(const RepeaterParams& p) {
  p.validate();
  const double l0 = p.link_length();
  ElementaryProbs out;
  out.t_cc = l0 / p.fiber_speed;
  out.p0 = p.chi * p.chi * std::exp(-l0 / p.attenuation_length) * p.eta_fc * p.eta_fc *
           p.eta_td * p.eta_td / 2.0;
  require(out.p0 <= 1.0, "elementary link probability exceeds 1");
  out.p0_multiplexed = p.linear_multiplexing
                           ? static_cast<double>(p.modes) * out.p0
                           : -std::expm1(static_cast<double>(p.modes) * std::log1p(-out.p0));
  return out;
}

RateBreakdown swap_chain(const RepeaterParams& p) {
  const auto elem = elementary_probs(p);
  RateBreakdown out;
  out.t_cc = elem.t_cc;
  out.p0 = elem.p0;
  out.p0_multiplexed = elem.p0_multiplexed;

  auto decayed = [&](double t) { return std::isinf(p.tau0) ? 0.0 : t / p.tau0; };
  auto fail = [&out] {
    out.underflow = true;
    out.rate = 0.0;
    return out;
  };

  if (!(elem.p0_multiplexed > 0.0)) return fail();
  double t = elem.t_cc / elem.p0_multiplexed;
  out.stage_times.push_back(t);
  double log_rate = std::log(elem.p0_multiplexed) - std::log(elem.t_cc);
  for (int j = 1; j <= p.nest_level; ++j) {
    const double x = decayed(t);
    if (!std::isfinite(t) || x > kDecayGuard) return fail();
    const double log_pj = 2.0 * (std::log(p.r0) - x) + 2.0 * std::log(p.eta_td) - std::log(2.0);
    const double pj = std::exp(log_pj);
    out.swap_probs.push_back(pj);
    log_rate += log_pj;
    t = t / pj;
    out.stage_times.push_back(t);
  }
  const double x = decayed(t);
  if (!std::isfinite(t) || x > kDecayGuard) return fail();
  const double log_ppr = 2.0 * (std::log(p.r0) - x) - std::log(2.0);
  out.p_pr = std::exp(log_ppr);
  log_rate += log_ppr;
  out.rate = std::exp(log_rate);
  return out;
}

Sweep sweep_distance(RepeaterParams p, double l_min, double l_max, int steps, Grid grid,
                     unsigned threads) {
  require(positive(l_min) && l_max > l_min && std::isfinite(l_max),
          "sweep range must satisfy 0 < l_min < l_max");
  require(steps >= 2, "sweep needs at least 2 steps");
  Sweep sweep;
  sweep.points.resize(static_cast<std::size_t>(steps));
  detail::parallel_chunks(
      static_cast<std::uint64_t>(steps), static_cast<std::uint64_t>(steps), detail::resolve_threads(threads),
      [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
          const double f = static_cast<double>(i) / (steps - 1);
          double l = grid == Grid::kLog ? l_min * std::pow(l_max / l_min, f)
                                        : l_min + (l_max - l_min) * f;
          if (i + 1 == static_cast<std::uint64_t>(steps)) l = l_max;
          RepeaterParams q = p;
          q.distance = l;
          sweep.points[i] = {l, swap_chain(q)};
        }
      });
  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    if (sweep.points[i].breakdown.rate > sweep.points[i - 1].breakdown.rate) sweep.monotone = false;
  }
  return sweep;
}

double threshold_distance(RepeaterParams p, double threshold, double l_lo, double l_hi) {
  require(positive(threshold), "threshold must be positive");
  auto excess = [&](double l) {
    p.distance = l;
    const double r = swap_chain(p).rate;
    return r > 0.0 ? std::log(r) - std::log(threshold) : -std::numeric_limits<double>::infinity();
  };
  double lo = l_lo, hi = l_hi;
  require(excess(lo) > 0.0 && excess(hi) < 0.0,
          "rate does not cross the threshold inside the distance bracket");
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double calibrate_chi(RepeaterParams p, double target_rate) {
  require(positive(target_rate), "target rate must be positive");
  auto excess = [&](double log_chi) {
    p.chi = std::exp(log_chi);
    const double r = swap_chain(p).rate;
    return r > 0.0 ? std::log(r) - std::log(target_rate)
                   : -std::numeric_limits<double>::infinity();
  };
  double lo = std::log(1e-9), hi = 0.0;
  require(excess(hi) > 0.0, "target rate is unreachable even at chi = 1");
  require(excess(lo) < 0.0, "target rate is exceeded even at chi = 1e-9");
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

RepeaterParams fig8_preset(double r0, double chi) {
  RepeaterParams p;
  p.nest_level = 4;
  p.modes = 1000;
  p.distance = kFig8AnchorDistance;
  p.attenuation_length = 22e3;
  p.fiber_speed = 2.0e8;
  p.chi = chi;
  p.eta_fc = 0.33;
  p.eta_td = 0.88;
  p.r0 = r0;
  p.tau0 = 16.0;
  p.link_divisor = LinkDivisor::kPowerOfTwo;
  return p;
}

}  // namespace dlcz
