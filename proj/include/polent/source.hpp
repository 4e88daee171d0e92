#pragma once

// Probabilistic entangled-pair source (Werner-state noise driven by the
// signal-idler cross-correlation) and Poissonian coincidence counting.

#include "polent/polarization.hpp"

#include <nlohmann/json_fwd.hpp>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polent {

/// Cross-correlation model g_SI(rate) = 1 + kappa / rate. The default kappa
/// is fitted to the operating points 0.88 @ 5e5, 0.95 @ 2e5 and 0.99 @ 2e4
/// pairs/s; it is an inferred calibration, not a measured one.
struct SourceModel {
  double kappa = 5.5e6;
  double max_rate = 1e6;

  void validate() const;
};

struct DetectorModel {
  double efficiency = 1.0;
  double dark_rate = 0.0;  // counts/s

  static DetectorModel visible_spad() { return {0.68, 0.0}; }
  static DetectorModel telecom_snspd() { return {0.90, 0.0}; }
  void validate() const;
};

struct ModePair {
  MeasurementMode first;
  MeasurementMode second;

  auto operator<=>(const ModePair&) const = default;
  std::string name() const;
  /// "HV" -> {H, V}. Throws std::invalid_argument.
  static ModePair parse(const std::string& s);
};

/// HH, HV, VH, VV, DD, DA, AD, AA.
const std::vector<ModePair>& fidelity_bounding_modes();

struct MeasurementPlan {
  std::vector<ModePair> modes = fidelity_bounding_modes();
  double dwell_s = 1.0;  // per mode pair
  double coincidence_window_s = 1e-9;

  void validate() const;
};

struct CoincidenceCounts {
  std::map<ModePair, std::int64_t> counts;
  double dwell_s = 1.0;

  /// Throws std::out_of_range when the mode pair was not measured.
  std::int64_t at(MeasurementMode a, MeasurementMode b) const;
  bool has(MeasurementMode a, MeasurementMode b) const { return counts.contains({a, b}); }
};

/// {"dwell_s": 1.0, "counts": {"HH": 5000, ...}}
CoincidenceCounts counts_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CoincidenceCounts& c);
CoincidenceCounts load_counts(const std::filesystem::path& path);

double gsi_at_rate(const SourceModel& src, double rate);
/// 1 - 3 / (2 (1 + g)); requires g >= 1.
double fidelity_from_gsi(double g);
double werner_parameter_from_gsi(double g);  // (g-1)/(g+1)
double gsi_from_werner_parameter(double a);  // (1+a)/(1-a)
TwoQubitState state_at_rate(const SourceModel& src, double rate);

/// Poisson counts with mean rate * transmission * eta1 * eta2 * dwell * p(a,b)
/// (plus dark-count accidentals). `channel` rotates the second photon.
CoincidenceCounts simulate_counts(const TwoQubitState& rho, double rate, double transmission,
                                  const DetectorModel& first, const DetectorModel& second,
                                  const MeasurementPlan& plan, const std::optional<PoincareRotation>& channel,
                                  Rng& rng);

/// Sum over the {H,V}^2 modes divided by eta1 * eta2 * dwell.
double pair_rate_from_counts(const CoincidenceCounts& c, double eta_first, double eta_second);

}  // namespace polent
