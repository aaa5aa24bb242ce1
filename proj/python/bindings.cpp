#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dlcz/cli.hpp"
#include "dlcz/config.hpp"
#include "dlcz/decoherence.hpp"
#include "dlcz/entanglement.hpp"
#include "dlcz/errors.hpp"
#include "dlcz/estimators.hpp"
#include "dlcz/mc_engine.hpp"
#include "dlcz/params.hpp"
#include "dlcz/repeater.hpp"

namespace py = pybind11;
using namespace dlcz;

namespace {

template <typename T>
py::class_<T> plain(py::module_& m, const char* name) {
  return py::class_<T>(m, name).def(py::init<>()).def(py::self == py::self);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DLCZ memory simulator and estimators";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base);
  py::register_exception<DegenerateStatisticsError>(m, "DegenerateStatisticsError", base);
  py::register_exception<FitError>(m, "FitError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<SchemaError>(m, "SchemaError", base);
  py::register_exception<IoError>(m, "IoError", base);

  // Parameters
  plain<DecayParams>(m, "DecayParams")
      .def(py::init([](double r0, double tau0) { return DecayParams{r0, tau0}; }), py::arg("r0"),
           py::arg("tau0"))
      .def_readwrite("r0", &DecayParams::r0)
      .def_readwrite("tau0", &DecayParams::tau0)
      .def("validate", &DecayParams::validate);

  plain<DetectionChain>(m, "DetectionChain")
      .def_readwrite("t_oc", &DetectionChain::t_oc)
      .def_readwrite("cavity_loss", &DetectionChain::cavity_loss)
      .def_readwrite("eta_smf", &DetectionChain::eta_smf)
      .def_readwrite("eta_filter", &DetectionChain::eta_filter)
      .def_readwrite("eta_mmf", &DetectionChain::eta_mmf)
      .def_readwrite("eta_d", &DetectionChain::eta_d)
      .def("validate", &DetectionChain::validate)
      .def_static("as_built", &DetectionChain::as_built)
      .def_static("improved", &DetectionChain::improved);

  plain<EnsembleGeometry>(m, "EnsembleGeometry")
      .def_readwrite("wavelength", &EnsembleGeometry::wavelength)
      .def_readwrite("temperature", &EnsembleGeometry::temperature)
      .def_readwrite("atomic_mass", &EnsembleGeometry::atomic_mass)
      .def_readwrite("bd_separation", &EnsembleGeometry::bd_separation)
      .def_readwrite("f_btd", &EnsembleGeometry::f_btd)
      .def_readwrite("f0", &EnsembleGeometry::f0)
      .def("validate", &EnsembleGeometry::validate);

  plain<ExperimentParams>(m, "ExperimentParams")
      .def_readwrite("chi", &ExperimentParams::chi)
      .def_readwrite("noise_b", &ExperimentParams::noise_b)
      .def_readwrite("noise_c", &ExperimentParams::noise_c)
      .def_readwrite("eta_s", &ExperimentParams::eta_s)
      .def_readwrite("eta_as", &ExperimentParams::eta_as)
      .def_readwrite("v0", &ExperimentParams::v0)
      .def_readwrite("phase", &ExperimentParams::phase)
      .def_readwrite("decay", &ExperimentParams::decay)
      .def("validate", &ExperimentParams::validate);

  plain<CycleTiming>(m, "CycleTiming")
      .def_readwrite("prep_duration", &CycleTiming::prep_duration)
      .def_readwrite("run_duration", &CycleTiming::run_duration)
      .def_readwrite("trial_period", &CycleTiming::trial_period)
      .def("cycle_duration", &CycleTiming::cycle_duration)
      .def("trials_per_run", &CycleTiming::trials_per_run)
      .def("validate", &CycleTiming::validate);

  m.def("cavity_escape_efficiency", &cavity_escape_efficiency, py::arg("t_oc"), py::arg("cavity_loss"));
  m.def("transmission_efficiency", &transmission_efficiency);
  m.def("total_detection_efficiency", &total_detection_efficiency);
  m.def("coupling_angle", &coupling_angle);
  m.def("repetition_rate", &repetition_rate);

  // Decoherence
  m.def("retrieval_decay", &retrieval_decay, py::arg("params"), py::arg("t"));
  m.def("motional_lifetime", py::overload_cast<const EnsembleGeometry&>(&motional_lifetime));
  py::class_<DecayFit>(m, "DecayFit")
      .def_readonly("params", &DecayFit::params)
      .def_readonly("residual", &DecayFit::residual)
      .def_readonly("iterations", &DecayFit::iterations)
      .def_readonly("weighted", &DecayFit::weighted)
      .def_readonly("r0_sigma", &DecayFit::r0_sigma)
      .def_readonly("tau0_sigma", &DecayFit::tau0_sigma);
  m.def(
      "fit_decay",
      [](const std::vector<std::tuple<double, double, double>>& rows) {
        std::vector<DecaySample> s;
        for (const auto& [t, r, sigma] : rows) s.push_back({t, r, sigma});
        return fit_decay(s);
      },
      py::arg("samples"), "samples: list of (t, R, sigma); sigma <= 0 means unweighted");

  // Entanglement model
  plain<AngleSettings>(m, "AngleSettings")
      .def(py::init([](double s, double as) { return AngleSettings{s, as}; }), py::arg("theta_s"),
           py::arg("theta_as"))
      .def_readwrite("theta_s", &AngleSettings::theta_s)
      .def_readwrite("theta_as", &AngleSettings::theta_as);
  py::class_<JointOutcomeProbs>(m, "JointOutcomeProbs")
      .def_readonly("p13", &JointOutcomeProbs::p13)
      .def_readonly("p24", &JointOutcomeProbs::p24)
      .def_readonly("p14", &JointOutcomeProbs::p14)
      .def_readonly("p23", &JointOutcomeProbs::p23)
      .def("correlation", &JointOutcomeProbs::correlation);
  m.def("projection_probs", &projection_probs, py::arg("angles"), py::arg("visibility"),
        py::arg("phase") = 0.0);
  py::enum_<CoincidenceModel>(m, "CoincidenceModel")
      .value("SINGLES_PRODUCT", CoincidenceModel::kSinglesProduct)
      .value("FEED_FORWARD", CoincidenceModel::kFeedForward);
  py::class_<ForwardProbs>(m, "ForwardProbs")
      .def_readonly("retrieval", &ForwardProbs::retrieval)
      .def_readonly("p_s", &ForwardProbs::p_s)
      .def_readonly("p_as", &ForwardProbs::p_as)
      .def_readonly("p_s_as", &ForwardProbs::p_s_as)
      .def_readonly("p13", &ForwardProbs::p13)
      .def_readonly("p24", &ForwardProbs::p24)
      .def_readonly("p14", &ForwardProbs::p14)
      .def_readonly("p23", &ForwardProbs::p23);
  m.def("forward_count_probs", &forward_count_probs, py::arg("params"), py::arg("t"),
        py::arg("angles"), py::arg("model") = CoincidenceModel::kSinglesProduct);

  // Monte Carlo
  plain<CountsTable>(m, "CountsTable")
      .def_readwrite("settings", &CountsTable::settings)
      .def_readwrite("storage_time", &CountsTable::storage_time)
      .def_readwrite("n_pulses", &CountsTable::n_pulses)
      .def_readwrite("n_d1", &CountsTable::n_d1)
      .def_readwrite("n_d2", &CountsTable::n_d2)
      .def_readwrite("c13", &CountsTable::c13)
      .def_readwrite("c24", &CountsTable::c24)
      .def_readwrite("c14", &CountsTable::c14)
      .def_readwrite("c23", &CountsTable::c23);
  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("tables", &ExperimentResult::tables)
      .def_readonly("simulated_wall_time", &ExperimentResult::simulated_wall_time);
  m.def(
      "run_experiment",
      [](const ExperimentParams& p, const CycleTiming& timing, double t,
         const std::vector<AngleSettings>& angles, std::uint64_t n, std::uint64_t seed,
         bool double_pair, unsigned threads) {
        EngineOptions o;
        o.double_pair = double_pair;
        o.threads = threads;
        py::gil_scoped_release release;
        return run_experiment(p, timing, t, angles, n, seed, o);
      },
      py::arg("params"), py::arg("timing"), py::arg("t"), py::arg("angles"), py::arg("n_trials"),
      py::arg("seed"), py::arg("double_pair") = false, py::arg("threads") = 0);

  // Estimators
  py::class_<EstimateWithError>(m, "EstimateWithError")
      .def_readonly("value", &EstimateWithError::value)
      .def_readonly("sigma", &EstimateWithError::sigma);
  plain<BellSettings>(m, "BellSettings")
      .def_readwrite("theta_s", &BellSettings::theta_s)
      .def_readwrite("theta_s_prime", &BellSettings::theta_s_prime)
      .def_readwrite("theta_as", &BellSettings::theta_as)
      .def_readwrite("theta_as_prime", &BellSettings::theta_as_prime)
      .def("combinations", [](const BellSettings& b) {
        const auto c = b.combinations();
        return std::vector<AngleSettings>(c.begin(), c.end());
      });
  py::class_<BellResult>(m, "BellResult")
      .def_readonly("s", &BellResult::s)
      .def_readonly("signed_s", &BellResult::signed_s)
      .def_readonly("correlations", &BellResult::correlations)
      .def("violation_sigmas", &BellResult::violation_sigmas);
  m.def("intrinsic_retrieval_qubit",
        py::overload_cast<const CountsTable&, double>(&intrinsic_retrieval_qubit));
  m.def("correlation_E", py::overload_cast<const CountsTable&>(&correlation_E));
  m.def(
      "bell_S",
      [](const std::vector<CountsTable>& tables, const BellSettings& settings, int replicas,
         std::uint64_t seed) { return bell_S(tables, settings, replicas, seed); },
      py::arg("tables"), py::arg("settings") = BellSettings{}, py::arg("replicas") = 10000,
      py::arg("seed") = 0);
  m.def("visibility_from_S", &visibility_from_S);
  m.def("fidelity_from_S", &fidelity_from_S);
  py::class_<CorrectedRetrieval>(m, "CorrectedRetrieval")
      .def_readonly("r_inc", &CorrectedRetrieval::r_inc)
      .def_readonly("r_net", &CorrectedRetrieval::r_net)
      .def_readonly("clamped", &CorrectedRetrieval::clamped);
  m.def("retrieval_background_corrected", &retrieval_background_corrected, py::arg("p_s_as"),
        py::arg("p_s"), py::arg("p_as"), py::arg("noise_b"), py::arg("eta_s"), py::arg("eta_as"));

  // Repeater
  py::enum_<LinkDivisor>(m, "LinkDivisor")
      .value("POWER_OF_TWO", LinkDivisor::kPowerOfTwo)
      .value("NEST_LEVEL", LinkDivisor::kNestLevel);
  plain<RepeaterParams>(m, "RepeaterParams")
      .def_readwrite("nest_level", &RepeaterParams::nest_level)
      .def_readwrite("modes", &RepeaterParams::modes)
      .def_readwrite("distance", &RepeaterParams::distance)
      .def_readwrite("attenuation_length", &RepeaterParams::attenuation_length)
      .def_readwrite("fiber_speed", &RepeaterParams::fiber_speed)
      .def_readwrite("chi", &RepeaterParams::chi)
      .def_readwrite("eta_fc", &RepeaterParams::eta_fc)
      .def_readwrite("eta_td", &RepeaterParams::eta_td)
      .def_readwrite("r0", &RepeaterParams::r0)
      .def_readwrite("tau0", &RepeaterParams::tau0)
      .def_readwrite("link_divisor", &RepeaterParams::link_divisor)
      .def_readwrite("linear_multiplexing", &RepeaterParams::linear_multiplexing);
  py::class_<RateBreakdown>(m, "RateBreakdown")
      .def_readonly("t_cc", &RateBreakdown::t_cc)
      .def_readonly("p0", &RateBreakdown::p0)
      .def_readonly("p0_multiplexed", &RateBreakdown::p0_multiplexed)
      .def_readonly("swap_probs", &RateBreakdown::swap_probs)
      .def_readonly("stage_times", &RateBreakdown::stage_times)
      .def_readonly("p_pr", &RateBreakdown::p_pr)
      .def_readonly("rate", &RateBreakdown::rate)
      .def_readonly("underflow", &RateBreakdown::underflow);
  m.def("swap_chain", &swap_chain);
  m.def("threshold_distance", &threshold_distance, py::arg("params"), py::arg("threshold"),
        py::arg("l_lo"), py::arg("l_hi"));
  m.def("calibrate_chi", &calibrate_chi, py::arg("params"), py::arg("target_rate"));
  m.def("fig8_preset", &fig8_preset, py::arg("r0"), py::arg("chi") = kFig8CalibratedChi);

  // Configuration and command line
  m.def("canonical_dump_default", [] { return canonical_dump(Config{}); });
  m.def("check_config", [](const std::string& text) { return canonical_dump(parse_config(text)); },
        "Parses config text and returns its canonical dump");
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"dlcz"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the dlcz tool; returns (exit code, stdout, stderr)");
}
