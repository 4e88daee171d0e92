#include "polent/source.hpp"

#include "polent/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace polent {

void SourceModel::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("source kappa must be > 0");
  if (!(max_rate > 0.0)) throw std::invalid_argument("source max rate must be > 0");
}

void DetectorModel::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw std::invalid_argument("detector efficiency must lie in (0, 1]");
  if (!(dark_rate >= 0.0)) throw std::invalid_argument("detector dark rate must be >= 0");
}

std::string ModePair::name() const { return {to_char(first), to_char(second)}; }

ModePair ModePair::parse(const std::string& s) {
  if (s.size() != 2) throw std::invalid_argument("mode pair must be two letters, got '" + s + "'");
  return {parse_mode(s[0]), parse_mode(s[1])};
}

const std::vector<ModePair>& fidelity_bounding_modes() {
  using M = MeasurementMode;
  static const std::vector<ModePair> modes = {{M::H, M::H}, {M::H, M::V}, {M::V, M::H}, {M::V, M::V},
                                              {M::D, M::D}, {M::D, M::A}, {M::A, M::D}, {M::A, M::A}};
  return modes;
}

void MeasurementPlan::validate() const {
  if (modes.empty()) throw std::invalid_argument("measurement plan has no mode pairs");
  if (!(dwell_s > 0.0)) throw std::invalid_argument("dwell time must be > 0");
  if (!(coincidence_window_s >= 0.0)) throw std::invalid_argument("coincidence window must be >= 0");
}

std::int64_t CoincidenceCounts::at(MeasurementMode a, MeasurementMode b) const {
  const auto it = counts.find({a, b});
  if (it == counts.end()) throw std::out_of_range("mode pair " + ModePair{a, b}.name() + " was not measured");
  return it->second;
}

CoincidenceCounts counts_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("counts document must be a JSON object");
  CoincidenceCounts c;
  if (j.contains("dwell_s")) {
    if (!j["dwell_s"].is_number() || !(j["dwell_s"].get<double>() > 0.0)) {
      throw InputError("\"dwell_s\" must be a positive number");
    }
    c.dwell_s = j["dwell_s"].get<double>();
  }
  if (!j.contains("counts") || !j["counts"].is_object()) throw InputError("missing \"counts\" object");
  for (const auto& [key, value] : j["counts"].items()) {
    ModePair mp{};
    try {
      mp = ModePair::parse(key);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("counts: ") + e.what());
    }
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
      throw InputError("count for " + key + " must be a non-negative integer");
    }
    c.counts[mp] = value.get<std::int64_t>();
  }
  return c;
}

nlohmann::json to_json(const CoincidenceCounts& c) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [mp, n] : c.counts) counts[mp.name()] = n;
  return {{"dwell_s", c.dwell_s}, {"counts", counts}};
}

CoincidenceCounts load_counts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open counts file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return counts_from_json(j);
}

double gsi_at_rate(const SourceModel& src, double rate) {
  src.validate();
  if (!(rate > 0.0)) throw std::invalid_argument("pair rate must be > 0");
  if (rate > src.max_rate) throw std::invalid_argument("pair rate exceeds the source maximum");
  return 1.0 + src.kappa / rate;
}

double fidelity_from_gsi(double g) {
  if (!(g >= 1.0)) throw std::invalid_argument("cross-correlation g_SI must be >= 1");
  if (std::isinf(g)) return 1.0;
  return 1.0 - 3.0 / (2.0 * (1.0 + g));
}

double werner_parameter_from_gsi(double g) {
  if (!(g >= 1.0)) throw std::invalid_argument("cross-correlation g_SI must be >= 1");
  if (std::isinf(g)) return 1.0;
  return (g - 1.0) / (g + 1.0);
}

double gsi_from_werner_parameter(double a) {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("Werner parameter must lie in [0, 1)");
  return (1.0 + a) / (1.0 - a);
}

TwoQubitState state_at_rate(const SourceModel& src, double rate) {
  return werner_state(werner_parameter_from_gsi(gsi_at_rate(src, rate)));
}

CoincidenceCounts simulate_counts(const TwoQubitState& rho, double rate, double transmission,
                                  const DetectorModel& first, const DetectorModel& second,
                                  const MeasurementPlan& plan, const std::optional<PoincareRotation>& channel,
                                  Rng& rng) {
  first.validate();
  second.validate();
  plan.validate();
  if (!(rate >= 0.0)) throw std::invalid_argument("pair rate must be >= 0");
  if (!(transmission > 0.0 && transmission <= 1.0)) throw std::invalid_argument("transmission must lie in (0, 1]");

  const TwoQubitState state = channel ? apply_one_sided(rho, *channel) : rho;
  // Sorting makes the product independent of which factor carries which loss.
  std::array<double, 3> factors{transmission, first.efficiency, second.efficiency};
  std::sort(factors.begin(), factors.end());
  const double detected_rate = rate * (factors[0] * factors[1] * factors[2]);
  const double accidental = first.dark_rate * second.dark_rate * plan.coincidence_window_s * plan.dwell_s;

  CoincidenceCounts out;
  out.dwell_s = plan.dwell_s;
  for (const auto& mp : plan.modes) {
    const double mean = detected_rate * plan.dwell_s * coincidence_probability(state, mp.first, mp.second) + accidental;
    std::int64_t n = 0;
    if (mean > 0.0) {
      std::poisson_distribution<std::int64_t> poisson(mean);
      n = poisson(rng);
    }
    out.counts[mp] = n;
  }
  return out;
}

double pair_rate_from_counts(const CoincidenceCounts& c, double eta_first, double eta_second) {
  using M = MeasurementMode;
  if (!(eta_first > 0.0 && eta_second > 0.0)) throw std::invalid_argument("efficiencies must be > 0");
  if (!(c.dwell_s > 0.0)) throw std::invalid_argument("dwell time must be > 0");
  double total = 0.0;
  for (auto a : {M::H, M::V}) {
    for (auto b : {M::H, M::V}) {
      if (!c.has(a, b)) throw std::invalid_argument("pair rate needs the " + ModePair{a, b}.name() + " count");
      total += static_cast<double>(c.at(a, b));
    }
  }
  return total / (eta_first * eta_second * c.dwell_s);
}

}  // namespace polent
