#pragma once

#include <string>
#include <vector>

namespace dlcz {

/// How the total distance is divided into elementary links.
enum class LinkDivisor {
  kPowerOfTwo,  ///< 2^n links for nest level n
  kNestLevel,   ///< n links, literal L0 = L / n
};

std::string to_string(LinkDivisor d);
LinkDivisor link_divisor_from_string(const std::string& s);

/// Inputs of the multiplexed nested-repeater mean-rate model.
struct RepeaterParams {
  int nest_level = 4;
  int modes = 1000;
  double distance = 1.0e6;            ///< m
  double attenuation_length = 22e3;   ///< m
  double fiber_speed = 2.0e8;         ///< m/s
  double chi = 0.02;
  double eta_fc = 0.33;
  double eta_td = 0.88;
  double r0 = 0.8;
  double tau0 = 16.0;                 ///< s; +inf disables memory decay
  LinkDivisor link_divisor = LinkDivisor::kPowerOfTwo;
  /// Use P0^(N) ~ N P0 instead of 1 - (1 - P0)^N.
  bool linear_multiplexing = false;

  void validate() const;
  double links() const;
  double link_length() const { return distance / links(); }

  bool operator==(const RepeaterParams&) const = default;
};

struct ElementaryProbs {
  double t_cc = 0.0;            ///< s, L0 / c
  double p0 = 0.0;              ///< single-mode link success
  double p0_multiplexed = 0.0;  ///< N-mode link success
};

struct RateBreakdown {
  double t_cc = 0.0;
  double p0 = 0.0;
  double p0_multiplexed = 0.0;
  std::vector<double> swap_probs;   ///< P_1 .. P_n
  std::vector<double> stage_times;  ///< t_0 .. t_n, s
  double p_pr = 0.0;
  double rate = 0.0;                ///< pairs / s
  bool underflow = false;           ///< some t_j / tau0 exceeded 700; rate forced to 0
};

/// T_cc = L0/c, P0 = chi^2 exp(-L0/L_att) eta_FC^2 eta_TD^2 / 2 and the
/// multiplexed success 1 - (1 - P0)^N.
ElementaryProbs elementary_probs(const RepeaterParams& p);

/// Mean-time swapping recursion: t_0 = T_cc / P0^(N);
/// P_j = (R0 e^{-t_{j-1}/tau0})^2 eta_TD^2 / 2, t_j = t_{j-1} / P_j;
/// P_pr = (R0 e^{-t_n/tau0})^2 / 2; rate = P0^(N) (prod P_j) P_pr / T_cc.
RateBreakdown swap_chain(const RepeaterParams& p);

enum class Grid { kLog, kLinear };

struct SweepPoint {
  double distance = 0.0;
  RateBreakdown breakdown;
};

struct Sweep {
  std::vector<SweepPoint> points;
  bool monotone = true;  ///< rate non-increasing along the grid
};

/// Evaluates swap_chain on `steps` grid points spanning [l_min, l_max].
Sweep sweep_distance(RepeaterParams p, double l_min, double l_max, int steps,
                     Grid grid = Grid::kLog, unsigned threads = 1);

/// Distance in [l_lo, l_hi] where the rate falls through `threshold`, by
/// bisection on ln(rate). Throws DomainError when the bracket does not
/// straddle the threshold.
double threshold_distance(RepeaterParams p, double threshold, double l_lo, double l_hi);

/// Excitation probability that puts the rate at `target_rate` for p.distance,
/// by bisection on ln(chi) over (0, 1].
double calibrate_chi(RepeaterParams p, double target_rate);

/// Anchor of the long-distance preset: 1e-4 pairs/s at 1000 km with R0 = 0.8.
inline constexpr double kFig8AnchorRate = 1e-4;
inline constexpr double kFig8AnchorDistance = 1.0e6;
/// chi obtained from calibrate_chi(fig8_preset(0.8, 1.0), anchor), rounded
/// to five significant figures. Derived from the anchor, not a measured value.
inline constexpr double kFig8CalibratedChi = 0.045226;

/// n = 4, N = 1000, tau0 = 16 s, eta_TD = 0.88, eta_FC = 0.33, 2^n links,
/// L_att = 22 km, c = 2e8 m/s, with the given R0 and chi.
RepeaterParams fig8_preset(double r0, double chi = kFig8CalibratedChi);

}  // namespace dlcz
