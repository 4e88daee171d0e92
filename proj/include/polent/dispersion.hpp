#pragma once

// Wavelength- and time-resolved analysis of polarimeter sweeps: rotation
// estimation per wavelength, rotation spread and rate, corrected Bell-state
// fidelity, Gaussian spectral averaging and temporal fidelity maps.

#include "polent/channel.hpp"
#include "polent/polarization.hpp"

#include <nlohmann/json_fwd.hpp>

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polent {

enum class Probe : std::uint8_t { H = 0, D = 1, R = 2 };

/// Responses to the three probes at one wavelength, indexed by Probe.
struct SweepPoint {
  double wavelength_nm = 0.0;
  std::array<StokesVector, 3> responses{};
};

struct SweepSnapshot {
  double timestamp_s = 0.0;
  std::vector<SweepPoint> points;
};

struct PolarimeterSweep {
  // Fiber configuration, e.g. "2 fibers". Stored as a "# label: ..." line.
  std::string label;
  std::vector<SweepSnapshot> snapshots;

  std::size_t record_count() const;
};

class SweepError : public std::runtime_error {
 public:
  enum class Kind { kSchema, kEmpty, kMissingProbe, kDuplicateProbe, kNonMonotone, kGridMismatch };
  SweepError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr const char* kSweepHeader = "timestamp_s,wavelength_nm,probe,s1,s2,s3,dop";

PolarimeterSweep parse_sweep(std::istream& in, const std::string& source = "<stream>");
PolarimeterSweep load_sweep(const std::filesystem::path& path);
void write_sweep(const PolarimeterSweep& sweep, std::ostream& out);

/// Noiseless when pm.noise_std == 0. One snapshot at the channel's current state.
SweepSnapshot simulate_snapshot(const FiberChannel& ch, const PolarimeterModel& pm, double timestamp_s, Rng& rng);
/// `snapshots` sweeps `interval_s` apart, drifting the channel in between.
PolarimeterSweep simulate_sweep(FiberChannel ch, const PolarimeterModel& pm, std::size_t snapshots,
                                double interval_s, Rng& rng, std::string label = {});

struct WavelengthRotation {
  double wavelength_nm;
  PoincareRotation rotation;
  double angle;
};

struct WavelengthValue {
  double wavelength_nm;
  double value;
};

/// Throws EstimationError naming the wavelength if a probe triple is degenerate.
std::vector<WavelengthRotation> rotations_vs_wavelength(const PolarimeterSweep& sweep, std::size_t snapshot = 0);

/// Projection of the entrywise mean onto SO(3). Throws EstimationError when
/// the mean is singular.
PoincareRotation chordal_mean(std::span<const PoincareRotation> rotations);
std::vector<WavelengthValue> rotation_relative_to_mean(std::span<const WavelengthRotation> rotations);
/// Angle between neighbours divided by their spacing, reported at the midpoint.
std::vector<WavelengthValue> rotation_per_nm(std::span<const WavelengthRotation> rotations);
/// Fidelity after undoing the rotation at `reference_nm` for every wavelength.
std::vector<WavelengthValue> corrected_fidelity_curve(std::span<const WavelengthRotation> rotations,
                                                      double reference_nm);
/// Gaussian-weighted mean of the curve (trapezoidal weights, truncated and
/// renormalized over the grid). fwhm = 0 returns the value at `center_nm`.
double spectral_weighted_fidelity(std::span<const WavelengthValue> curve, double center_nm, double fwhm_nm);

struct FidelityMap {
  std::vector<double> timestamps_s;
  std::vector<double> wavelengths_nm;
  // rows: wavelength, columns: timestamp
  Eigen::MatrixXd fidelity;
};

/// cos^2 of the rotation since the first snapshot, per wavelength.
FidelityMap temporal_fidelity_map(const PolarimeterSweep& sweep);

struct SpectralPoint {
  double fwhm_nm;
  double fidelity;
};

struct DispersionReport {
  std::string label;
  double reference_nm = 1300.0;
  double center_fwhm_nm = 10.0;
  std::vector<WavelengthRotation> rotations;
  std::vector<WavelengthValue> relative_to_mean;
  std::vector<WavelengthValue> per_nm;
  std::vector<WavelengthValue> corrected_fidelity;
  std::vector<SpectralPoint> spectral;                // F vs FWHM at the reference
  std::vector<WavelengthValue> fidelity_vs_center;    // F at center_fwhm_nm vs center
  std::optional<FidelityMap> temporal;
};

DispersionReport analyze_sweep(const PolarimeterSweep& sweep, double reference_nm, std::span<const double> fwhms_nm,
                               double center_fwhm_nm = 10.0);
nlohmann::json to_json(const DispersionReport& r);
/// fig2a.csv ... fig2f.csv, fig3.csv (multi-snapshot sweeps only) and report.json.
void write_report_files(const DispersionReport& r, const std::filesystem::path& dir);

}  // namespace polent
