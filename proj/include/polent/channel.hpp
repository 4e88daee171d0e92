#pragma once

// Simulated deployed fiber: a wavelength-resolved Poincare rotation field that
// drifts in time, a dB loss budget, and the polarimeter used to probe it.

#include "polent/polarization.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace polent {

/// Uniform wavelength grid; the default is the 1260-1350 nm O-band sweep at
/// 1 nm.
struct WavelengthGrid {
  double start_nm = 1260.0;
  double step_nm = 1.0;
  std::size_t count = 91;

  double at(std::size_t i) const { return start_nm + step_nm * static_cast<double>(i); }
  double stop_nm() const { return at(count - 1); }
  /// Index of the nearest grid point. Throws std::out_of_range when the
  /// wavelength lies more than half a step outside the grid.
  std::size_t snap(double wavelength_nm) const;
  void validate() const;
};

struct LossElement {
  std::string name;
  double db = 0.0;
};

class LossBudget {
 public:
  LossBudget() = default;
  /// Throws std::invalid_argument on a negative element.
  explicit LossBudget(std::vector<LossElement> elements);

  /// 14.45 dB metropolitan fiber plus the telecom-arm components.
  static LossBudget deployed_link();

  void add(LossElement e);
  const std::vector<LossElement>& elements() const { return elements_; }

 private:
  std::vector<LossElement> elements_;
};

double total_loss_db(const LossBudget& b);
/// 10^(-dB/10).
double transmission(double db);

/// [{"name": "...", "db": 0.74}, ...]
LossBudget loss_budget_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LossBudget& b);
LossBudget load_loss_budget(const std::filesystem::path& path);

/// Slow random walk on SO(3) plus Poisson-distributed discrete jumps. The
/// defaults are synthetic, not fitted to a measured fiber.
struct DriftProcess {
  double walk_rate_rad_per_sqrt_hour = 0.05;
  double jump_rate_per_day = 2.0;
  // Jump angle ~ LogNormal(log(median), sigma).
  double jump_median_rad = 0.6;
  double jump_log_sigma = 0.5;
  // Correlation length of the random-walk increments across the grid
  // (Gaussian kernel); 0 makes every grid point independent.
  double decorrelation_nm = 20.0;

  static DriftProcess none() { return {0.0, 0.0, 0.6, 0.5, 20.0}; }
  void validate() const;
};

struct PolarimeterModel {
  double rate_hz = 1e4;
  double noise_std = 0.005;  // per Stokes component, per measurement

  void validate() const;
  double seconds_for(std::size_t measurements) const { return static_cast<double>(measurements) / rate_hz; }
};

class FiberChannel {
 public:
  /// Throws std::invalid_argument if the field size does not match the grid
  /// or adjacent rotations differ by more than max_step_rad_per_nm.
  FiberChannel(WavelengthGrid grid, std::vector<PoincareRotation> field, LossBudget loss = {},
               DriftProcess drift = DriftProcess::none(), double max_step_rad_per_nm = 1.0);

  static FiberChannel uniform(WavelengthGrid grid, const PoincareRotation& r, LossBudget loss = {},
                              DriftProcess drift = DriftProcess::none());

  const WavelengthGrid& grid() const { return grid_; }
  const std::vector<PoincareRotation>& field() const { return field_; }
  const PoincareRotation& rotation(std::size_t i) const { return field_.at(i); }
  /// Rotation at the grid point nearest to the wavelength.
  const PoincareRotation& rotation_at(double wavelength_nm) const { return field_[grid_.snap(wavelength_nm)]; }

  const LossBudget& loss() const { return loss_; }
  const DriftProcess& drift() const { return drift_; }
  double max_step_rad_per_nm() const { return max_step_; }

  double elapsed_s() const { return elapsed_s_; }
  std::uint64_t drift_steps() const { return drift_steps_; }
  std::uint64_t jump_count() const { return jumps_; }

  /// Largest rotation angle between adjacent grid points, per nm.
  double max_adjacent_rotation_per_nm() const;

  FiberChannel with_drift(DriftProcess d) const;

 private:
  friend FiberChannel step_drift(const FiberChannel& ch, double dt_s, Rng& rng);

  WavelengthGrid grid_;
  std::vector<PoincareRotation> field_;
  LossBudget loss_;
  DriftProcess drift_;
  double max_step_;
  double elapsed_s_ = 0.0;
  std::uint64_t drift_steps_ = 0;
  std::uint64_t jumps_ = 0;
};

/// Re-orthonormalization cadence for accumulated drift products.
inline constexpr std::uint64_t kReorthonormalizeEvery = 1000;

/// One polarimeter reading of R(lambda) s_in. Noise perturbs the direction
/// only, so the reading keeps the input's degree of polarization.
StokesVector probe_response(const FiberChannel& ch, double wavelength_nm, const StokesVector& s_in,
                            const PolarimeterModel& pm, Rng& rng);
/// Mean of `samples` consecutive polarimeter readings of a rotated state.
StokesVector measure_rotated(const PoincareRotation& r, const StokesVector& s_in, const PolarimeterModel& pm,
                             std::size_t samples, Rng& rng);

/// Orthogonal Procrustes: the proper rotation minimizing
/// sum |R in_i - out_i|^2 over normalized vectors. Throws EstimationError when
/// two outputs are parallel (within 1e-6) or an output has DOP < 0.5.
PoincareRotation estimate_rotation(std::span<const StokesVector, 3> inputs,
                                   std::span<const StokesVector, 3> outputs);
/// Same with the canonical {H, D, R} probe frame as inputs.
PoincareRotation estimate_rotation(std::span<const StokesVector, 3> outputs);

/// The {H, D, R} probe states.
std::array<StokesVector, 3> probe_frame();

/// Advances the field by dt: every grid rotation is left-multiplied by a
/// small rotation (angle |N(0, rate^2 dt)|, angle and axis smoothly
/// correlated across the grid),
/// then a Poisson number of large common jumps is applied.
FiberChannel step_drift(const FiberChannel& ch, double dt_s, Rng& rng);

struct DispersiveChannelParams {
  WavelengthGrid grid{};
  std::size_t plates = 8;
  // d(retardance)/d(lambda) of every plate.
  double retardance_dispersion_rad_per_nm = 0.01;
  double center_nm = 1305.0;
};

/// Concatenation of `plates` birefringent elements with random axes whose
/// retardance is linear in wavelength. Zero plates gives the identity field.
FiberChannel synth_dispersive_channel(const DispersiveChannelParams& p, Rng& rng, LossBudget loss = {},
                                      DriftProcess drift = DriftProcess::none());

}  // namespace polent
