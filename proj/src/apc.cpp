#include "polent/apc.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace polent {

namespace {

Rng stream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
  return Rng(seq);
}

enum Stream : std::uint32_t { kDriftStream = 1, kPolarimeterStream = 2, kCompCountStream = 3, kUncompCountStream = 4,
                              kInitialStream = 5 };

std::vector<StokesVector> measure_all(const PoincareRotation& total, const ApcConfig& cfg, const PolarimeterModel& pm,
                                      Rng& rng) {
  std::vector<StokesVector> out;
  out.reserve(cfg.probes.size());
  for (const auto& p : cfg.probes) out.push_back(measure_rotated(total, p, pm, cfg.samples_per_probe, rng));
  return out;
}

}  // namespace

CompensatorState CompensatorState::neutral() {
  CompensatorState c;
  c.retardances.fill(kPi / 2.0);
  return c;
}

const std::array<Vector3, CompensatorState::kPlates>& CompensatorState::axes() {
  static const std::array<Vector3, kPlates> a = {Vector3::UnitX(), Vector3::UnitY(), Vector3::UnitX(),
                                                 Vector3::UnitY()};
  return a;
}

CompensatorState CompensatorState::wrapped() const {
  CompensatorState c = *this;
  for (auto& r : c.retardances) {
    r = std::fmod(r, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    if (r >= 2.0 * kPi) r = 0.0;
  }
  return c;
}

PoincareRotation CompensatorState::rotation() const {
  PoincareRotation r;
  for (std::size_t i = 0; i < kPlates; ++i) r = PoincareRotation::from_axis_angle(axes()[i], retardances[i]) * r;
  return r;
}

void ApcConfig::validate() const {
  if (!(trigger_threshold > 0.0 && trigger_threshold <= 1.0)) throw std::invalid_argument("trigger threshold must lie in (0, 1]");
  if (!(optimization_threshold > 0.0 && optimization_threshold <= 1.0)) {
    throw std::invalid_argument("optimization threshold must lie in (0, 1]");
  }
  if (!(check_period_s > 0.0)) throw std::invalid_argument("check period must be > 0");
  if (probes.size() < 2) throw std::invalid_argument("APC needs at least two probe states");
  bool spans = false;
  for (const auto& p : probes) {
    if (p.dop() <= 0.0) throw std::invalid_argument("APC probe states must be polarized");
    const Vector3 u = p.vector().normalized();
    for (const auto& q : probes) spans = spans || u.cross(q.vector().normalized()).norm() > 1e-6;
  }
  // Two non-collinear probes are the minimum that pins down a rotation.
  if (!spans) throw std::invalid_argument("APC probe states must not all lie on one axis");
  if (samples_per_probe == 0) throw std::invalid_argument("samples per probe must be > 0");
  if (!(gradient_step > 0.0)) throw std::invalid_argument("gradient step must be > 0");
  if (!(finite_difference_rad > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  if (!(measurement_time_s >= 0.03 - 1e-12)) throw std::invalid_argument("measurement time must be >= 0.03 s");
  if (!(iteration_time_s >= 0.0)) throw std::invalid_argument("iteration time must be >= 0");
  if (!(max_cycle_s <= 1.0 + 1e-12 && max_cycle_s >= measurement_time_s)) {
    throw std::invalid_argument("cycle cap must lie in [measurement time, 1.0 s]");
  }
}

const char* to_string(DowntimeCause c) { return c == DowntimeCause::kCheck ? "check" : "optimization"; }

void UptimeLedger::add(double start_s, double duration_s, DowntimeCause cause) {
  if (!(start_s >= 0.0) || !(duration_s >= 0.0)) throw std::invalid_argument("downtime interval must be non-negative");
  if (!intervals_.empty()) {
    const auto& last = intervals_.back();
    if (start_s < last.start_s + last.duration_s) throw std::invalid_argument("downtime intervals overlap");
  }
  intervals_.push_back({start_s, duration_s, cause});
  elapsed_s_ = std::max(elapsed_s_, start_s + duration_s);
}

void UptimeLedger::set_elapsed(double elapsed_s) {
  double end = 0.0;
  if (!intervals_.empty()) end = intervals_.back().start_s + intervals_.back().duration_s;
  elapsed_s_ = std::max(elapsed_s, end);
}

double UptimeLedger::total_downtime_s() const {
  double total = 0.0;
  for (const auto& i : intervals_) total += i.duration_s;
  return total;
}

double UptimeLedger::downtime_until(double t_s) const {
  double total = 0.0;
  for (const auto& i : intervals_) {
    if (i.start_s >= t_s) break;
    total += std::min(i.duration_s, t_s - i.start_s);
  }
  return total;
}

double uptime(const UptimeLedger& ledger) {
  if (!(ledger.elapsed_s() > 0.0)) throw std::invalid_argument("uptime needs a positive elapsed time");
  return 1.0 - ledger.total_downtime_s() / ledger.elapsed_s();
}

Reference reference_capture(const PoincareRotation& fiber, const CompensatorState& comp, const ApcConfig& cfg,
                            const PolarimeterModel& pm, Rng& rng) {
  cfg.validate();
  pm.validate();
  return {cfg.probes, measure_all(comp.rotation() * fiber, cfg, pm, rng)};
}

Reference reference_capture(const FiberChannel& ch, double wavelength_nm, const CompensatorState& comp,
                            const ApcConfig& cfg, const PolarimeterModel& pm, Rng& rng) {
  return reference_capture(ch.rotation_at(wavelength_nm), comp, cfg, pm, rng);
}

double classical_fidelity(std::span<const StokesVector> current, std::span<const StokesVector> reference) {
  if (current.size() != reference.size() || current.empty()) {
    throw std::invalid_argument("classical fidelity needs equal, non-empty response sets");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (current[i].dop() == 0.0 || reference[i].dop() == 0.0) {
      throw std::invalid_argument("classical fidelity of an unpolarized response");
    }
    const double dot = current[i].normalized().vector().dot(reference[i].normalized().vector());
    sum += 0.5 * (1.0 + std::clamp(dot, -1.0, 1.0));
  }
  return sum / static_cast<double>(current.size());
}

const char* to_string(CyclePath p) { return p == CyclePath::kFastCheck ? "fast-check" : "optimized"; }

CycleOutcome compensation_cycle(const PoincareRotation& fiber, const CompensatorState& comp, const ApcConfig& cfg,
                                const Reference& ref, const PolarimeterModel& pm, Rng& rng) {
  cfg.validate();
  if (ref.responses.size() != cfg.probes.size()) throw std::invalid_argument("reference does not match the probe set");

  auto measure = [&](const CompensatorState& c) {
    const auto resp = measure_all(c.rotation() * fiber, cfg, pm, rng);
    return classical_fidelity(resp, ref.responses);
  };

  CycleOutcome out{comp, {}};
  auto& res = out.result;
  res.pre_fidelity = measure(comp);
  res.post_fidelity = res.pre_fidelity;
  res.accepted_trace.push_back(res.pre_fidelity);
  res.duration_s = cfg.measurement_time_s;
  if (res.pre_fidelity >= cfg.trigger_threshold) return out;

  res.path = CyclePath::kOptimized;
  const double max_slew = std::min(kPi, 2.0 * kPi * comp.bandwidth_hz * cfg.iteration_time_s);
  const double h = cfg.finite_difference_rad;
  double eta = cfg.gradient_step;
  double f = res.pre_fidelity;
  CompensatorState current = comp;

  while (res.iterations < cfg.max_iterations && f < cfg.optimization_threshold) {
    ++res.iterations;
    std::array<double, CompensatorState::kPlates> grad{};
    for (std::size_t i = 0; i < CompensatorState::kPlates; ++i) {
      CompensatorState plus = current;
      CompensatorState minus = current;
      plus.retardances[i] += h;
      minus.retardances[i] -= h;
      grad[i] = (measure(plus) - measure(minus)) / (2.0 * h);
    }
    double slope = 0.0;
    for (double g : grad) slope += g * g;
    auto step = [&](double a) {
      CompensatorState trial = current;
      for (std::size_t i = 0; i < CompensatorState::kPlates; ++i) {
        trial.retardances[i] += std::clamp(a * grad[i], -max_slew, max_slew);
      }
      return trial.wrapped();
    };
    bool accepted = false;
    for (std::size_t k = 0; k <= cfg.max_backtracks && !accepted; ++k) {
      CompensatorState trial = step(eta);
      double ft = measure(trial);
      // Quadratic interpolation through f(0), f'(0) and f(eta).
      const double curv = (ft - f - slope * eta) / (eta * eta);
      if (curv < 0.0) {
        const double a = std::clamp(-slope / (2.0 * curv), 0.25 * eta, 4.0 * eta);
        CompensatorState refined = step(a);
        const double fr = measure(refined);
        if (fr > ft) {
          trial = refined;
          ft = fr;
        }
      }
      if (ft > f) {
        current = trial;
        f = ft;
        accepted = true;
        res.accepted_trace.push_back(f);
      } else {
        eta *= 0.5;
      }
    }
    if (!accepted) eta = cfg.gradient_step;
  }

  out.compensator = current;
  res.post_fidelity = f;
  res.converged = f >= cfg.optimization_threshold;
  res.duration_s = std::min(cfg.max_cycle_s,
                            cfg.measurement_time_s + static_cast<double>(res.iterations) * cfg.iteration_time_s);
  return out;
}

CycleOutcome compensation_cycle(const FiberChannel& ch, double wavelength_nm, const CompensatorState& comp,
                                const ApcConfig& cfg, const Reference& ref, const PolarimeterModel& pm, Rng& rng) {
  return compensation_cycle(ch.rotation_at(wavelength_nm), comp, cfg, ref, pm, rng);
}

void LongRunConfig::validate() const {
  apc.validate();
  polarimeter.validate();
  drift.validate();
  source.validate();
  first_detector.validate();
  second_detector.validate();
  plan.validate();
  if (!(rate > 0.0 && rate <= source.max_rate)) throw std::invalid_argument("pair rate must lie in (0, max rate]");
  if (!(sampling_period_s > 0.0)) throw std::invalid_argument("sampling period must be > 0");
  if (!(duration_s > sampling_period_s)) throw std::invalid_argument("duration must exceed the sampling period");
}

FiberChannel longrun_channel(const LongRunConfig& cfg) {
  Rng rng = stream(cfg.seed, kInitialStream);
  const WavelengthGrid grid{cfg.wavelength_nm, 1.0, 1};
  return FiberChannel::uniform(grid, random_rotation(rng), cfg.loss, cfg.drift);
}

LongRunResult run_long_term(const FiberChannel& channel, const LongRunConfig& cfg) {
  cfg.validate();
  Rng drift_rng = stream(cfg.seed, kDriftStream);
  Rng pol_rng = stream(cfg.seed, kPolarimeterStream);
  Rng comp_rng = stream(cfg.seed, kCompCountStream);
  Rng uncomp_rng = stream(cfg.seed, kUncompCountStream);

  const double lambda = cfg.wavelength_nm;
  const double t_link = transmission(total_loss_db(channel.loss()));
  const TwoQubitState rho = state_at_rate(cfg.source, cfg.rate);

  FiberChannel ch = channel;
  CompensatorState comp = CompensatorState::neutral();
  const PoincareRotation fiber0 = ch.rotation_at(lambda);
  // Both paths are calibrated once at t = 0 by a fixed correction.
  const PoincareRotation comp_correction = (comp.rotation() * fiber0).transpose();
  const PoincareRotation uncomp_correction = fiber0.transpose();
  const Reference ref = reference_capture(fiber0, comp, cfg.apc, cfg.polarimeter, pol_rng);

  LongRunResult out;
  double t = 0.0;
  double next_check = cfg.apc.check_period_s;
  double next_sample = cfg.sampling_period_s;

  auto advance_to = [&](double target) {
    if (target > t) {
      ch = step_drift(ch, target - t, drift_rng);
      t = target;
    }
  };

  while (true) {
    const bool check = next_check <= next_sample;
    const double when = check ? next_check : next_sample;
    if (when > cfg.duration_s) break;
    advance_to(when);
    if (check) {
      auto cycle = compensation_cycle(ch, lambda, comp, cfg.apc, ref, cfg.polarimeter, pol_rng);
      comp = cycle.compensator;
      const auto cause = cycle.result.path == CyclePath::kFastCheck ? DowntimeCause::kCheck : DowntimeCause::kOptimization;
      out.ledger.add(t, cycle.result.duration_s, cause);
      next_check = t + cycle.result.duration_s + cfg.apc.check_period_s;
      out.cycles.push_back({t, std::move(cycle.result)});
    } else {
      const PoincareRotation fiber = ch.rotation_at(lambda);
      const PoincareRotation comp_residual = comp_correction * comp.rotation() * fiber;
      const PoincareRotation uncomp_residual = uncomp_correction * fiber;
      const auto comp_counts = simulate_counts(rho, cfg.rate, t_link, cfg.first_detector, cfg.second_detector,
                                               cfg.plan, comp_residual, comp_rng);
      const auto uncomp_counts = simulate_counts(rho, cfg.rate, t_link, cfg.first_detector, cfg.second_detector,
                                                 cfg.plan, uncomp_residual, uncomp_rng);
      LongRunSample s{};
      s.t_s = t;
      s.pair_rate = pair_rate_from_counts(comp_counts, cfg.first_detector.efficiency, cfg.second_detector.efficiency);
      s.compensated = bounds_from_counts(comp_counts, cfg.bounds);
      s.uncompensated = bounds_from_counts(uncomp_counts, cfg.bounds);
      s.uptime_cum = 1.0 - out.ledger.downtime_until(t) / t;
      s.compensated_residual_rad = rotation_angle(comp_residual);
      s.uncompensated_residual_rad = rotation_angle(uncomp_residual);
      out.samples.push_back(s);
      next_sample += cfg.sampling_period_s;
    }
  }
  out.ledger.set_elapsed(cfg.duration_s);
  out.jumps = ch.jump_count();
  return out;
}

std::vector<double> trailing_average(std::span<const double> t_s, std::span<const double> values, double window_s) {
  if (t_s.size() != values.size()) throw std::invalid_argument("trailing average needs equal-length series");
  if (!(window_s > 0.0)) throw std::invalid_argument("trailing window must be > 0");
  std::vector<double> out(values.size());
  std::size_t begin = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    while (t_s[begin] <= t_s[i] - window_s) sum -= values[begin++];
    out[i] = sum / static_cast<double>(i - begin + 1);
  }
  return out;
}

void write_time_series(const LongRunResult& r, std::ostream& out, double trailing_window_s) {
  out << kTimeSeriesHeader;
  std::array<std::vector<double>, 4> avg;
  if (trailing_window_s > 0.0) {
    out << ",comp_lower_avg,comp_upper_avg,uncomp_lower_avg,uncomp_upper_avg";
    std::vector<double> t;
    std::array<std::vector<double>, 4> cols;
    for (const auto& s : r.samples) {
      t.push_back(s.t_s);
      cols[0].push_back(s.compensated.lower);
      cols[1].push_back(s.compensated.upper);
      cols[2].push_back(s.uncompensated.lower);
      cols[3].push_back(s.uncompensated.upper);
    }
    for (std::size_t k = 0; k < 4; ++k) avg[k] = trailing_average(t, cols[k], trailing_window_s);
  }
  out << '\n';
  const auto old = out.precision(10);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    out << s.t_s << ',' << s.pair_rate << ',' << s.compensated.lower << ',' << s.compensated.upper << ','
        << s.uncompensated.lower << ',' << s.uncompensated.upper << ',' << s.uptime_cum;
    if (trailing_window_s > 0.0) {
      for (std::size_t k = 0; k < 4; ++k) out << ',' << avg[k][i];
    }
    out << '\n';
  }
  out.precision(old);
}

void write_cycle_log(const LongRunResult& r, std::ostream& out) {
  out << kCycleLogHeader << '\n';
  const auto old = out.precision(10);
  for (const auto& c : r.cycles) {
    out << c.t_s << ',' << to_string(c.result.path) << ',' << c.result.duration_s << ',' << c.result.pre_fidelity
        << ',' << c.result.post_fidelity << ',' << c.result.iterations << '\n';
  }
  out.precision(old);
}

LongRunSummary summarize(const LongRunResult& r) {
  LongRunSummary s{};
  s.uptime = uptime(r.ledger);
  const double n = static_cast<double>(std::max<std::size_t>(r.samples.size(), 1));
  s.min_uncomp_lower = r.samples.empty() ? 0.0 : 1.0;
  for (const auto& x : r.samples) {
    s.mean_comp_lower += x.compensated.lower / n;
    s.mean_comp_upper += x.compensated.upper / n;
    s.mean_uncomp_lower += x.uncompensated.lower / n;
    s.mean_uncomp_upper += x.uncompensated.upper / n;
    s.min_uncomp_lower = std::min(s.min_uncomp_lower, x.uncompensated.lower);
  }
  s.checks = r.cycles.size();
  for (const auto& c : r.cycles) {
    if (c.result.path == CyclePath::kOptimized) ++s.optimizations;
    if (!c.result.converged) ++s.unconverged;
  }
  s.jumps = r.jumps;
  return s;
}

nlohmann::json to_json(const LongRunSummary& s) {
  return {{"uptime", s.uptime},
          {"mean_comp_lower", s.mean_comp_lower},
          {"mean_comp_upper", s.mean_comp_upper},
          {"mean_uncomp_lower", s.mean_uncomp_lower},
          {"mean_uncomp_upper", s.mean_uncomp_upper},
          {"min_uncomp_lower", s.min_uncomp_lower},
          {"checks", s.checks},
          {"optimizations", s.optimizations},
          {"unconverged", s.unconverged},
          {"jumps", s.jumps}};
}

}  // namespace polent
