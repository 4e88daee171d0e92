#include "polent/apc.hpp"
#include "polent/bounds.hpp"
#include "polent/channel.hpp"
#include "polent/dispersion.hpp"
#include "polent/errors.hpp"
#include "polent/polarization.hpp"
#include "polent/source.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <map>
#include <string>

namespace py = pybind11;
using namespace polent;

namespace {

CoincidenceCounts counts_from_dict(const std::map<std::string, std::int64_t>& d, double dwell_s) {
  CoincidenceCounts c;
  c.dwell_s = dwell_s;
  for (const auto& [k, v] : d) {
    if (v < 0) throw std::invalid_argument("count for " + k + " must be non-negative");
    c.counts[ModePair::parse(k)] = v;
  }
  return c;
}

std::map<std::string, std::int64_t> counts_to_dict(const CoincidenceCounts& c) {
  std::map<std::string, std::int64_t> out;
  for (const auto& [mp, n] : c.counts) out[mp.name()] = n;
  return out;
}

BoundOptions bound_options(const std::string& form, const std::string& normalization) {
  BoundOptions o;
  if (form == "literal") {
    o.form = BoundOptions::Form::kLiteral;
  } else if (form != "sound") {
    throw std::invalid_argument("form must be 'sound' or 'literal'");
  }
  if (normalization == "per_basis") {
    o.normalization = BoundOptions::Normalization::kPerBasis;
  } else if (normalization != "linear_total") {
    throw std::invalid_argument("normalization must be 'linear_total' or 'per_basis'");
  }
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polarization-entanglement distribution: rotations, fidelity bounds and compensation.";

  py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SweepError>(m, "SweepError", PyExc_ValueError);

  m.def("rotation_matrix", [](const Vector3& axis, double angle) {
        return PoincareRotation::from_axis_angle(axis, angle).matrix();
      }, py::arg("axis"), py::arg("angle"));
  m.def("rotation_angle", [](const Matrix3& r) { return rotation_angle(PoincareRotation(r)); }, py::arg("rotation"));
  m.def("estimate_rotation", [](const Matrix3& outputs) {
        std::array<StokesVector, 3> out{StokesVector(Vector3(outputs.row(0).transpose())),
                                        StokesVector(Vector3(outputs.row(1).transpose())),
                                        StokesVector(Vector3(outputs.row(2).transpose()))};
        return estimate_rotation(std::span<const StokesVector, 3>(out)).matrix();
      }, py::arg("outputs"), "Rotation from the responses (rows) to the H, D, R probes.");
  m.def("su2_from_poincare", [](const Matrix3& r) { return su2_from_poincare(PoincareRotation(r)); });

  m.def("werner_state", [](double a) { return werner_state(a).matrix(); }, py::arg("a"));
  m.def("bell_phi_plus", []() { return bell_phi_plus().matrix(); });
  m.def("fidelity_to_phi_plus", [](const Matrix4c& rho) { return fidelity_to_phi_plus(rho); }, py::arg("rho"));
  m.def("apply_one_sided", [](const Matrix4c& rho, const Matrix3& r) {
        return apply_one_sided(TwoQubitState(rho), PoincareRotation(r)).matrix();
      }, py::arg("rho"), py::arg("rotation"));
  m.def("coincidence_probability", [](const Matrix4c& rho, const std::string& modes) {
        const auto mp = ModePair::parse(modes);
        return coincidence_probability(TwoQubitState(rho), mp.first, mp.second);
      }, py::arg("rho"), py::arg("modes"));

  m.def("gsi_at_rate", [](double rate, double kappa) { return gsi_at_rate(SourceModel{kappa, 1e6}, rate); },
        py::arg("rate"), py::arg("kappa") = SourceModel{}.kappa);
  m.def("fidelity_from_gsi", &fidelity_from_gsi, py::arg("g"));
  m.def("werner_parameter_from_gsi", &werner_parameter_from_gsi, py::arg("g"));

  m.def("transmission", &transmission, py::arg("db"));
  m.def("deployed_loss_db", []() { return total_loss_db(LossBudget::deployed_link()); });

  m.def("simulate_counts", [](double rate, double transmission_, double dwell_s, std::uint64_t seed,
                              const std::array<double, 2>& efficiencies, double kappa) {
        Rng rng(seed);
        MeasurementPlan plan;
        plan.dwell_s = dwell_s;
        const auto c = simulate_counts(state_at_rate(SourceModel{kappa, 1e6}, rate), rate, transmission_,
                                       DetectorModel{efficiencies[0], 0.0}, DetectorModel{efficiencies[1], 0.0}, plan,
                                       std::nullopt, rng);
        return counts_to_dict(c);
      }, py::arg("rate"), py::arg("transmission") = 1.0, py::arg("dwell_s") = 1.0, py::arg("seed") = 0,
      py::arg("efficiencies") = std::array<double, 2>{0.68, 0.90}, py::arg("kappa") = SourceModel{}.kappa);

  m.def("bounds_from_counts", [](const std::map<std::string, std::int64_t>& counts, const std::string& form,
                                 const std::string& normalization, std::size_t bootstrap, std::uint64_t seed) {
        const auto c = counts_from_dict(counts, 1.0);
        const auto opts = bound_options(form, normalization);
        FidelityBounds b = bootstrap > 0
                               ? bounds_with_uncertainties(c, {UncertaintyOptions::Method::kBootstrap, bootstrap, seed}, opts)
                               : bounds_from_counts(c, opts);
        return to_json(b).dump();
      }, py::arg("counts"), py::arg("form") = "sound", py::arg("normalization") = "linear_total",
      py::arg("bootstrap") = 0, py::arg("seed") = 0, "Bounds report as a JSON string.");

  m.def("analyze_sweep_file", [](const std::string& path, double reference_nm, const std::vector<double>& fwhms) {
        const auto sweep = load_sweep(path);
        return to_json(analyze_sweep(sweep, reference_nm, fwhms)).dump();
      }, py::arg("path"), py::arg("reference_nm") = 1300.0,
      py::arg("fwhms") = std::vector<double>{0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0}, "Dispersion report as a JSON string.");

  m.def("run_long_term", [](double duration_days, std::uint64_t seed, bool drift) {
        LongRunConfig cfg;
        cfg.duration_s = duration_days * 86400.0;
        cfg.seed = seed;
        if (!drift) cfg.drift = DriftProcess::none();
        py::gil_scoped_release release;
        const auto r = run_long_term(longrun_channel(cfg), cfg);
        return to_json(summarize(r)).dump();
      }, py::arg("duration_days") = 1.0, py::arg("seed") = 1, py::arg("drift") = true,
      "Long-run summary as a JSON string.");
}
