#include "dlcz/entanglement.hpp"

#include <cmath>
#include <numbers>

#include "check.hpp"
#include "dlcz/decoherence.hpp"

namespace dlcz {

using detail::in_unit;
using detail::require;

bool AngleSettings::same_analysis(const AngleSettings& other, double tol) const {
  auto same = [tol](double a, double b) {
    const double d = std::remainder(a - b, std::numbers::pi);
    return std::abs(d) <= tol;
  };
  return same(theta_s, other.theta_s) && same(theta_as, other.theta_as);
}

JointOutcomeProbs projection_probs(const AngleSettings& angles, double visibility, double phase) {
  require(in_unit(visibility), "visibility must lie in [0,1]");
  const double e = visibility * std::cos(phase) * std::cos(2.0 * (angles.theta_s - angles.theta_as));
  const double matched = (1.0 + e) / 4.0;
  const double crossed = (1.0 - e) / 4.0;
  return {matched, matched, crossed, crossed};
}

ForwardProbs forward_count_probs(const ExperimentParams& params, double t,
                                 const AngleSettings& angles, CoincidenceModel model) {
  params.validate();
  const double r = retrieval_decay(params.decay, t);
  const auto joint = projection_probs(angles, params.v0, params.phase);

  ForwardProbs out;
  out.retrieval = r;
  out.p_s = (params.chi + params.noise_b) * params.eta_s;
  out.p_as = (params.chi * r + params.noise_c) * params.eta_as;

  const double correlated = params.chi * r * params.eta_s * params.eta_as;
  const double accidental_as =
      model == CoincidenceModel::kSinglesProduct ? out.p_as : params.noise_c * params.eta_as;
  const double accidental = out.p_s * accidental_as;

  out.p_s_as = correlated + accidental;
  out.p_d1 = out.p_s / 2.0;
  out.p_d2 = out.p_s / 2.0;
  out.p13 = correlated * joint.p13 + accidental / 4.0;
  out.p24 = correlated * joint.p24 + accidental / 4.0;
  out.p14 = correlated * joint.p14 + accidental / 4.0;
  out.p23 = correlated * joint.p23 + accidental / 4.0;

  for (double p : {out.p_s, out.p_as, out.p_s_as}) {
    require(in_unit(p), "forward model probability left [0,1]; check chi, noise and efficiencies");
  }
  return out;
}

}  // namespace dlcz
