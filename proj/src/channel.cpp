#include "polent/channel.hpp"

#include "polent/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace polent {

std::size_t WavelengthGrid::snap(double wavelength_nm) const {
  const double pos = (wavelength_nm - start_nm) / step_nm;
  const double idx = std::round(pos);
  if (!(idx >= 0.0 && idx <= static_cast<double>(count - 1)) || std::abs(pos - idx) > 0.5 + 1e-9) {
    throw std::out_of_range("wavelength " + std::to_string(wavelength_nm) + " nm outside grid [" +
                            std::to_string(start_nm) + ", " + std::to_string(stop_nm()) + "] nm");
  }
  return static_cast<std::size_t>(idx);
}

void WavelengthGrid::validate() const {
  if (count == 0) throw std::invalid_argument("wavelength grid must have at least one point");
  if (!(step_nm > 0.0)) throw std::invalid_argument("wavelength grid step must be positive");
  if (!std::isfinite(start_nm)) throw std::invalid_argument("wavelength grid start must be finite");
}

LossBudget::LossBudget(std::vector<LossElement> elements) {
  for (auto& e : elements) add(std::move(e));
}

LossBudget LossBudget::deployed_link() {
  return LossBudget({{"Metropolitan fiber", 14.45},
                     {"Input Paddles", 0.74},
                     {"APC Injector", 0.22},
                     {"Optical Switch", 0.52},
                     {"APC Compensator & Optical Switch", 1.54}});
}

void LossBudget::add(LossElement e) {
  if (!(e.db >= 0.0) || !std::isfinite(e.db)) {
    throw std::invalid_argument("loss element '" + e.name + "' must have a finite non-negative dB loss");
  }
  elements_.push_back(std::move(e));
}

double total_loss_db(const LossBudget& b) {
  double total = 0.0;
  for (const auto& e : b.elements()) total += e.db;
  return total;
}

double transmission(double db) {
  if (!(db >= 0.0)) throw std::invalid_argument("loss in dB must be non-negative");
  return std::pow(10.0, -db / 10.0);
}

LossBudget loss_budget_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("loss budget must be a JSON array of {\"name\", \"db\"} objects");
  LossBudget b;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("name") || !item.contains("db") || !item["name"].is_string() ||
        !item["db"].is_number()) {
      throw InputError("loss budget entry must be {\"name\": string, \"db\": number}");
    }
    try {
      b.add({item["name"].get<std::string>(), item["db"].get<double>()});
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  return b;
}

nlohmann::json to_json(const LossBudget& b) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : b.elements()) j.push_back({{"name", e.name}, {"db", e.db}});
  return j;
}

LossBudget load_loss_budget(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open loss budget file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("loss budget " + path.string() + ": " + e.what());
  }
  return loss_budget_from_json(j);
}

void DriftProcess::validate() const {
  if (!(walk_rate_rad_per_sqrt_hour >= 0.0)) throw std::invalid_argument("drift walk rate must be >= 0");
  if (!(jump_rate_per_day >= 0.0)) throw std::invalid_argument("drift jump rate must be >= 0");
  if (!(jump_median_rad > 0.0)) throw std::invalid_argument("drift jump median must be > 0");
  if (!(jump_log_sigma >= 0.0)) throw std::invalid_argument("drift jump log-sigma must be >= 0");
  if (!(decorrelation_nm >= 0.0)) throw std::invalid_argument("drift decorrelation scale must be >= 0");
}

void PolarimeterModel::validate() const {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("polarimeter rate must be > 0");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("polarimeter noise must be >= 0");
}

FiberChannel::FiberChannel(WavelengthGrid grid, std::vector<PoincareRotation> field, LossBudget loss,
                           DriftProcess drift, double max_step_rad_per_nm)
    : grid_(grid), field_(std::move(field)), loss_(std::move(loss)), drift_(drift), max_step_(max_step_rad_per_nm) {
  grid_.validate();
  drift_.validate();
  if (field_.size() != grid_.count) throw std::invalid_argument("rotation field size does not match the grid");
  if (!(max_step_ > 0.0)) throw std::invalid_argument("max rotation per nm must be positive");
  if (max_adjacent_rotation_per_nm() > max_step_) {
    throw std::invalid_argument("rotation field is discontinuous: " + std::to_string(max_adjacent_rotation_per_nm()) +
                                " rad/nm exceeds the configured maximum");
  }
}

FiberChannel FiberChannel::uniform(WavelengthGrid grid, const PoincareRotation& r, LossBudget loss,
                                   DriftProcess drift) {
  grid.validate();
  return FiberChannel(grid, std::vector<PoincareRotation>(grid.count, r), std::move(loss), drift);
}

double FiberChannel::max_adjacent_rotation_per_nm() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < field_.size(); ++i) {
    worst = std::max(worst, rotation_angle(field_[i].transpose() * field_[i + 1]) / grid_.step_nm);
  }
  return worst;
}

FiberChannel FiberChannel::with_drift(DriftProcess d) const {
  d.validate();
  FiberChannel out = *this;
  out.drift_ = d;
  return out;
}

StokesVector measure_rotated(const PoincareRotation& r, const StokesVector& s_in, const PolarimeterModel& pm,
                             std::size_t samples, Rng& rng) {
  const Vector3 ideal = r.matrix() * s_in.vector();
  const double dop = std::min(1.0, ideal.norm());
  if (pm.noise_std == 0.0 || dop == 0.0) return StokesVector(ideal);
  const double sigma = pm.noise_std / std::sqrt(static_cast<double>(std::max<std::size_t>(samples, 1)));
  std::normal_distribution<double> noise(0.0, sigma);
  const Vector3 raw = ideal + Vector3(noise(rng), noise(rng), noise(rng));
  const double n = raw.norm();
  if (n == 0.0) return StokesVector(ideal);
  return StokesVector(Vector3(raw * (dop / n)));
}

StokesVector probe_response(const FiberChannel& ch, double wavelength_nm, const StokesVector& s_in,
                            const PolarimeterModel& pm, Rng& rng) {
  return measure_rotated(ch.rotation_at(wavelength_nm), s_in, pm, 1, rng);
}

std::array<StokesVector, 3> probe_frame() { return {StokesVector::H(), StokesVector::D(), StokesVector::R()}; }

PoincareRotation estimate_rotation(std::span<const StokesVector, 3> inputs,
                                   std::span<const StokesVector, 3> outputs) {
  std::array<Vector3, 3> in;
  std::array<Vector3, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    if (inputs[i].dop() <= 0.0) throw EstimationError("probe input is unpolarized");
    if (outputs[i].dop() < 0.5) {
      throw EstimationError("probe response " + std::to_string(i) + " has DOP " + std::to_string(outputs[i].dop()) +
                            " < 0.5");
    }
    in[i] = inputs[i].vector().normalized();
    out[i] = outputs[i].vector().normalized();
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (out[i].cross(out[j]).norm() < 1e-6) {
        throw EstimationError("degenerate probe responses: outputs " + std::to_string(i) + " and " +
                              std::to_string(j) + " are parallel");
      }
    }
  }
  Matrix3 m = Matrix3::Zero();
  for (std::size_t i = 0; i < 3; ++i) m += out[i] * in[i].transpose();
  return PoincareRotation::project(m);
}

PoincareRotation estimate_rotation(std::span<const StokesVector, 3> outputs) {
  const auto frame = probe_frame();
  return estimate_rotation(std::span<const StokesVector, 3>(frame), outputs);
}

FiberChannel step_drift(const FiberChannel& ch, double dt_s, Rng& rng) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("drift step must be positive");
  FiberChannel out = ch;
  const DriftProcess& d = ch.drift_;
  const std::size_t n = ch.field_.size();

  if (d.walk_rate_rad_per_sqrt_hour > 0.0) {
    const double sigma = d.walk_rate_rad_per_sqrt_hour * std::sqrt(dt_s / 3600.0);
    std::normal_distribution<double> unit(0.0, 1.0);
    // Smooth field: white noise on kernel centres spaced half a correlation
    // length apart, blended with unit-norm Gaussian weights.
    const double ell = d.decorrelation_nm;
    const double lo = ch.grid_.start_nm;
    const double hi = ch.grid_.stop_nm();
    std::vector<double> centres;
    if (ell > 0.0) {
      for (double c = lo - ell; c <= hi + ell; c += 0.5 * ell) centres.push_back(c);
    }
    std::vector<double> z(centres.size());
    std::vector<Vector3> axes(centres.size());
    for (std::size_t k = 0; k < centres.size(); ++k) {
      z[k] = unit(rng);
      axes[k] = Vector3(unit(rng), unit(rng), unit(rng));
    }
    for (std::size_t i = 0; i < n; ++i) {
      double zi = 0.0;
      Vector3 axis = Vector3::Zero();
      if (centres.empty()) {
        zi = unit(rng);
        axis = Vector3(unit(rng), unit(rng), unit(rng));
      } else {
        double norm2 = 0.0;
        for (std::size_t k = 0; k < centres.size(); ++k) {
          const double u = (ch.grid_.at(i) - centres[k]) / (0.5 * ell);
          const double w = std::exp(-0.5 * u * u);
          zi += w * z[k];
          axis += w * axes[k];
          norm2 += w * w;
        }
        zi /= std::sqrt(norm2);
      }
      const double angle = std::abs(zi) * sigma;
      if (angle > 0.0 && axis.norm() > 0.0) {
        out.field_[i] = PoincareRotation::from_axis_angle(axis, angle) * out.field_[i];
      }
    }
  }

  if (d.jump_rate_per_day > 0.0) {
    std::poisson_distribution<int> events(d.jump_rate_per_day * dt_s / 86400.0);
    const int jumps = events(rng);
    std::lognormal_distribution<double> magnitude(std::log(d.jump_median_rad), d.jump_log_sigma);
    for (int k = 0; k < jumps; ++k) {
      const Vector3 axis = random_unit_vector(rng);
      const auto jump = PoincareRotation::from_axis_angle(axis, magnitude(rng));
      for (auto& r : out.field_) r = jump * r;
    }
    out.jumps_ += static_cast<std::uint64_t>(jumps);
  }

  out.elapsed_s_ += dt_s;
  ++out.drift_steps_;
  if (out.drift_steps_ % kReorthonormalizeEvery == 0) {
    for (auto& r : out.field_) r = r.orthonormalized();
  }
  return out;
}

FiberChannel synth_dispersive_channel(const DispersiveChannelParams& p, Rng& rng, LossBudget loss,
                                      DriftProcess drift) {
  p.grid.validate();
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<Vector3> axes(p.plates);
  std::vector<double> offsets(p.plates);
  for (std::size_t k = 0; k < p.plates; ++k) {
    axes[k] = random_unit_vector(rng);
    offsets[k] = phase(rng);
  }
  std::vector<PoincareRotation> field;
  field.reserve(p.grid.count);
  for (std::size_t i = 0; i < p.grid.count; ++i) {
    const double dl = p.grid.at(i) - p.center_nm;
    PoincareRotation r;
    for (std::size_t k = 0; k < p.plates; ++k) {
      r = PoincareRotation::from_axis_angle(axes[k], offsets[k] + p.retardance_dispersion_rad_per_nm * dl) * r;
    }
    field.push_back(r);
  }
  return FiberChannel(p.grid, std::move(field), std::move(loss), drift);
}

}  // namespace polent
