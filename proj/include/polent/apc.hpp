#pragma once

// Automated polarization compensation: reference capture, threshold-gated
// compensation cycles, downtime ledger and the long-run simulator.

#include "polent/bounds.hpp"
#include "polent/channel.hpp"
#include "polent/polarization.hpp"
#include "polent/source.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace polent {

/// Four variable retarders about the fixed axes S1, S2, S1, S2.
struct CompensatorState {
  static constexpr std::size_t kPlates = 4;

  std::array<double, kPlates> retardances{};
  double bandwidth_hz = 1.2e5;

  /// A well-conditioned starting point (full-rank parameter Jacobian).
  static CompensatorState neutral();

  /// Retardances wrapped into [0, 2 pi).
  CompensatorState wrapped() const;
  PoincareRotation rotation() const;
  static const std::array<Vector3, kPlates>& axes();
};

struct ApcConfig {
  double trigger_threshold = 0.99;
  double optimization_threshold = 0.99;
  double check_period_s = 20.0;
  std::vector<StokesVector> probes = {StokesVector::H(), StokesVector::D(), StokesVector::R()};
  std::size_t samples_per_probe = 100;
  // Initial gradient-ascent step in rad per unit gradient, adapted per cycle.
  double gradient_step = 3.0;
  double finite_difference_rad = 0.05;
  std::size_t max_backtracks = 6;
  std::size_t max_iterations = 50;
  double measurement_time_s = 0.03;
  double iteration_time_s = 0.0194;
  double max_cycle_s = 1.0;

  /// Throws std::invalid_argument.
  void validate() const;
};

enum class DowntimeCause { kCheck, kOptimization };
const char* to_string(DowntimeCause c);

struct DowntimeInterval {
  double start_s;
  double duration_s;
  DowntimeCause cause;
};

class UptimeLedger {
 public:
  /// Throws std::invalid_argument when the interval overlaps the previous one
  /// or starts before 0.
  void add(double start_s, double duration_s, DowntimeCause cause);
  /// Elapsed time is never shorter than the end of the last interval.
  void set_elapsed(double elapsed_s);

  double elapsed_s() const { return elapsed_s_; }
  const std::vector<DowntimeInterval>& intervals() const { return intervals_; }
  double total_downtime_s() const;
  /// Downtime inside [0, t].
  double downtime_until(double t_s) const;

 private:
  std::vector<DowntimeInterval> intervals_;
  double elapsed_s_ = 0.0;
};

/// 1 - downtime / elapsed. Throws std::invalid_argument when elapsed is 0.
double uptime(const UptimeLedger& ledger);

struct Reference {
  std::vector<StokesVector> probes;
  std::vector<StokesVector> responses;
};

/// Polarimeter responses through `fiber` followed by the compensator.
Reference reference_capture(const PoincareRotation& fiber, const CompensatorState& comp, const ApcConfig& cfg,
                            const PolarimeterModel& pm, Rng& rng);
Reference reference_capture(const FiberChannel& ch, double wavelength_nm, const CompensatorState& comp,
                            const ApcConfig& cfg, const PolarimeterModel& pm, Rng& rng);

/// Mean of (1 + s.s_ref) / 2 over normalized responses. Throws
/// std::invalid_argument on a size mismatch or a zero-DOP response.
double classical_fidelity(std::span<const StokesVector> current, std::span<const StokesVector> reference);

enum class CyclePath { kFastCheck, kOptimized };
const char* to_string(CyclePath p);

struct CompensationCycleResult {
  double pre_fidelity = 0.0;
  double post_fidelity = 0.0;
  std::size_t iterations = 0;
  double duration_s = 0.0;
  CyclePath path = CyclePath::kFastCheck;
  bool converged = true;
  // Measured fidelity after the initial check and after every accepted step.
  std::vector<double> accepted_trace;
};

struct CycleOutcome {
  CompensatorState compensator;
  CompensationCycleResult result;
};

CycleOutcome compensation_cycle(const PoincareRotation& fiber, const CompensatorState& comp, const ApcConfig& cfg,
                                const Reference& ref, const PolarimeterModel& pm, Rng& rng);
CycleOutcome compensation_cycle(const FiberChannel& ch, double wavelength_nm, const CompensatorState& comp,
                                const ApcConfig& cfg, const Reference& ref, const PolarimeterModel& pm, Rng& rng);

struct LongRunConfig {
  ApcConfig apc;
  PolarimeterModel polarimeter;
  DriftProcess drift;
  SourceModel source;
  DetectorModel first_detector = DetectorModel::visible_spad();
  DetectorModel second_detector = DetectorModel::telecom_snspd();
  LossBudget loss = LossBudget::deployed_link();
  double rate = 2e5;  // generated pairs/s; sets g_SI
  MeasurementPlan plan{fidelity_bounding_modes(), 10.0, 1e-9};
  BoundOptions bounds;
  double wavelength_nm = 1324.0;
  double duration_s = 15.0 * 86400.0;
  double sampling_period_s = 240.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct LongRunSample {
  double t_s;
  double pair_rate;
  FidelityBounds compensated;
  FidelityBounds uncompensated;
  double uptime_cum;
  double compensated_residual_rad;
  double uncompensated_residual_rad;
};

struct CycleLogEntry {
  double t_s;
  CompensationCycleResult result;
};

struct LongRunResult {
  std::vector<LongRunSample> samples;
  std::vector<CycleLogEntry> cycles;
  UptimeLedger ledger;
  std::uint64_t jumps = 0;
};

/// Single-wavelength channel at cfg.wavelength_nm with a random initial
/// rotation (drawn from the seed) and cfg's drift and loss.
FiberChannel longrun_channel(const LongRunConfig& cfg);

/// Event-driven simulation. APC checks run every check period after the
/// previous cycle ends; fidelity-bounding counts are drawn every sampling
/// period on the compensated path and on a path keeping the t = 0 correction.
/// Independent generator streams per role make the run a function of
/// (channel, cfg) only.
LongRunResult run_long_term(const FiberChannel& channel, const LongRunConfig& cfg);

/// Mean of the values with timestamps in (t - window, t], per sample.
std::vector<double> trailing_average(std::span<const double> t_s, std::span<const double> values, double window_s);

inline constexpr const char* kTimeSeriesHeader = "t_s,pair_rate,comp_lower,comp_upper,uncomp_lower,uncomp_upper,uptime_cum";
inline constexpr const char* kCycleLogHeader = "t_s,path,duration_s,pre_fid,post_fid,iterations";

/// A positive window appends comp_lower_avg, comp_upper_avg, uncomp_lower_avg, uncomp_upper_avg.
void write_time_series(const LongRunResult& r, std::ostream& out, double trailing_window_s = 0.0);
void write_cycle_log(const LongRunResult& r, std::ostream& out);

struct LongRunSummary {
  double uptime;
  double mean_comp_lower;
  double mean_comp_upper;
  double mean_uncomp_lower;
  double mean_uncomp_upper;
  double min_uncomp_lower;
  std::size_t checks;
  std::size_t optimizations;
  std::size_t unconverged;
  std::uint64_t jumps;
};

LongRunSummary summarize(const LongRunResult& r);
nlohmann::json to_json(const LongRunSummary& s);

}  // namespace polent
