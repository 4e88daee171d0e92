#include "cli/cli.hpp"

#include "polent/apc.hpp"
#include "polent/bounds.hpp"
#include "polent/channel.hpp"
#include "polent/dispersion.hpp"
#include "polent/errors.hpp"
#include "polent/source.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace polent::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Typed access to one JSON object that rejects keys nobody asked for.
class Section {
 public:
  Section(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ != nullptr && !j_->is_object()) throw ConfigError(path_ + " must be a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_ != nullptr && j_->contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = (*j_)[key];
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = (*j_)[key];
    if (!v.is_number_unsigned()) throw ConfigError(where(key) + " must be a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = (*j_)[key];
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& v = (*j_)[key];
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  const json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    return &(*j_)[key];
  }

  Section sub(const std::string& key) { return Section(raw(key), where(key)); }

  void finish() const {
    if (j_ == nullptr) return;
    for (const auto& [key, value] : j_->items()) {
      if (!key.empty() && key.front() == '_') continue;
      if (!seen_.contains(key)) throw ConfigError("unknown config key " + where(key));
    }
  }

 private:
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"seed", "analyze_sweep", "simulate_sweep", "rate_fidelity",
                                              "longrun", "bounds"};
  for (const auto& [key, value] : j.items()) {
    if (!key.empty() && key.front() == '_') continue;
    if (!known.contains(key)) throw ConfigError("unknown config key " + key);
  }
  return j;
}

std::uint64_t resolve_seed(const json& cfg, const GlobalOptions& g) {
  if (g.seed) return *g.seed;
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    return cfg["seed"].get<std::uint64_t>();
  }
  return kDefaultSeed;
}

Rng seeded(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return Rng(seq);
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw ConfigError("cannot create output directory " + dir);
  return p;
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

// ---- section parsers --------------------------------------------------------

DriftProcess parse_drift(Section s) {
  DriftProcess d;
  d.walk_rate_rad_per_sqrt_hour = s.number("walk_rate_rad_per_sqrt_hour", d.walk_rate_rad_per_sqrt_hour);
  d.jump_rate_per_day = s.number("jump_rate_per_day", d.jump_rate_per_day);
  d.jump_median_rad = s.number("jump_median_rad", d.jump_median_rad);
  d.jump_log_sigma = s.number("jump_log_sigma", d.jump_log_sigma);
  d.decorrelation_nm = s.number("decorrelation_nm", d.decorrelation_nm);
  s.finish();
  d.validate();
  return d;
}

json drift_json(const DriftProcess& d) {
  return {{"walk_rate_rad_per_sqrt_hour", d.walk_rate_rad_per_sqrt_hour},
          {"jump_rate_per_day", d.jump_rate_per_day},
          {"jump_median_rad", d.jump_median_rad},
          {"jump_log_sigma", d.jump_log_sigma},
          {"decorrelation_nm", d.decorrelation_nm}};
}

PolarimeterModel parse_polarimeter(Section s) {
  PolarimeterModel p;
  p.rate_hz = s.number("rate_hz", p.rate_hz);
  p.noise_std = s.number("noise_std", p.noise_std);
  s.finish();
  p.validate();
  return p;
}

json polarimeter_json(const PolarimeterModel& p) { return {{"rate_hz", p.rate_hz}, {"noise_std", p.noise_std}}; }

ApcConfig parse_apc(Section s) {
  ApcConfig c;
  c.trigger_threshold = s.number("trigger_threshold", c.trigger_threshold);
  c.optimization_threshold = s.number("optimization_threshold", c.optimization_threshold);
  c.check_period_s = s.number("check_period_s", c.check_period_s);
  c.samples_per_probe = s.count("samples_per_probe", c.samples_per_probe);
  c.gradient_step = s.number("gradient_step", c.gradient_step);
  c.finite_difference_rad = s.number("finite_difference_rad", c.finite_difference_rad);
  c.max_backtracks = s.count("max_backtracks", c.max_backtracks);
  c.max_iterations = s.count("max_iterations", c.max_iterations);
  c.measurement_time_s = s.number("measurement_time_s", c.measurement_time_s);
  c.iteration_time_s = s.number("iteration_time_s", c.iteration_time_s);
  c.max_cycle_s = s.number("max_cycle_s", c.max_cycle_s);
  s.finish();
  c.validate();
  return c;
}

json apc_json(const ApcConfig& c) {
  return {{"trigger_threshold", c.trigger_threshold},
          {"optimization_threshold", c.optimization_threshold},
          {"check_period_s", c.check_period_s},
          {"samples_per_probe", c.samples_per_probe},
          {"gradient_step", c.gradient_step},
          {"finite_difference_rad", c.finite_difference_rad},
          {"max_backtracks", c.max_backtracks},
          {"max_iterations", c.max_iterations},
          {"measurement_time_s", c.measurement_time_s},
          {"iteration_time_s", c.iteration_time_s},
          {"max_cycle_s", c.max_cycle_s}};
}

LossBudget parse_loss(Section& s) {
  const json* j = s.raw("loss_budget");
  if (j == nullptr) return LossBudget::deployed_link();
  try {
    return loss_budget_from_json(*j);
  } catch (const InputError& e) {
    throw ConfigError(std::string("loss_budget: ") + e.what());
  }
}

std::pair<DetectorModel, DetectorModel> parse_detectors(Section& s) {
  const auto eff = s.numbers("efficiencies", {0.68, 0.90});
  const auto dark = s.numbers("dark_rates_hz", {0.0, 0.0});
  if (eff.size() != 2 || dark.size() != 2) throw ConfigError("efficiencies and dark_rates_hz need two entries");
  DetectorModel a{eff[0], dark[0]};
  DetectorModel b{eff[1], dark[1]};
  a.validate();
  b.validate();
  return {a, b};
}

SourceModel parse_source(Section& s) {
  SourceModel src;
  src.kappa = s.number("kappa", src.kappa);
  src.max_rate = s.number("max_rate", src.max_rate);
  src.validate();
  return src;
}

BoundOptions parse_bound_options(Section& s) {
  BoundOptions o;
  const auto form = s.text("form", "sound");
  if (form == "sound") {
    o.form = BoundOptions::Form::kSound;
  } else if (form == "literal") {
    o.form = BoundOptions::Form::kLiteral;
  } else {
    throw ConfigError("form must be \"sound\" or \"literal\"");
  }
  const auto norm = s.text("normalization", "linear_total");
  if (norm == "linear_total") {
    o.normalization = BoundOptions::Normalization::kLinearTotal;
  } else if (norm == "per_basis") {
    o.normalization = BoundOptions::Normalization::kPerBasis;
  } else {
    throw ConfigError("normalization must be \"linear_total\" or \"per_basis\"");
  }
  return o;
}

const std::vector<double> kDefaultRates = {1e4,    2e4,   3e4,    5e4,  7.5e4,  1e5,    1.25e5,
                                           1.5e5,  1.75e5, 2e5,   2.25e5, 2.5e5, 2.75e5, 3e5,
                                           3.25e5, 3.5e5, 3.75e5, 4e5,  4.5e5,  5e5};
const std::vector<double> kDefaultFwhms = {0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0};

json default_config() {
  const DispersiveChannelParams synth;
  const LongRunConfig lr;
  return {
      {"_comment", "polent defaults. Keys starting with '_' are ignored; unknown keys are errors."},
      {"seed", kDefaultSeed},
      {"analyze_sweep",
       {{"_comment", "Sweep CSV; may also be given as the positional argument."},
        {"sweep", ""},
        {"reference_nm", 1300.0},
        {"fwhm_nm", kDefaultFwhms},
        {"center_fwhm_nm", 10.0}}},
      {"simulate_sweep",
       {{"_comment", "Stack of birefringent plates with retardance linear in wavelength."},
        {"start_nm", synth.grid.start_nm},
        {"step_nm", synth.grid.step_nm},
        {"count", synth.grid.count},
        {"plates", synth.plates},
        {"retardance_dispersion_rad_per_nm", synth.retardance_dispersion_rad_per_nm},
        {"center_nm", synth.center_nm},
        {"snapshots", 1},
        {"interval_s", 3600.0},
        {"label", "synthetic"},
        {"polarimeter", polarimeter_json(PolarimeterModel{})},
        {"drift", drift_json(DriftProcess{})}}},
      {"rate_fidelity",
       {{"_comment", "rate = generated pairs/s; g_SI = 1 + kappa/rate; dwell is per mode pair."},
        {"rates", kDefaultRates},
        {"kappa", SourceModel{}.kappa},
        {"max_rate", SourceModel{}.max_rate},
        {"dwell_s", 60.0},
        {"efficiencies", {0.68, 0.90}},
        {"dark_rates_hz", {0.0, 0.0}},
        {"coincidence_window_s", 1e-9},
        {"bootstrap", 1000},
        {"form", "sound"},
        {"normalization", "linear_total"},
        {"loss_budget", to_json(LossBudget::deployed_link())}}},
      {"longrun",
       {{"_comment", "sampling_period_s = 240: fidelity bounds every four minutes."},
        {"duration_days", lr.duration_s / 86400.0},
        {"sampling_period_s", lr.sampling_period_s},
        {"rate", lr.rate},
        {"kappa", lr.source.kappa},
        {"max_rate", lr.source.max_rate},
        {"dwell_s", lr.plan.dwell_s},
        {"wavelength_nm", lr.wavelength_nm},
        {"efficiencies", {lr.first_detector.efficiency, lr.second_detector.efficiency}},
        {"dark_rates_hz", {0.0, 0.0}},
        {"form", "sound"},
        {"normalization", "linear_total"},
        {"trailing_average_hours", 0.0},
        {"loss_budget", to_json(lr.loss)},
        {"drift", drift_json(lr.drift)},
        {"polarimeter", polarimeter_json(lr.polarimeter)},
        {"apc", apc_json(lr.apc)}}},
      {"bounds",
       {{"_comment", "Counts JSON; may also be given as the positional argument. method: bootstrap | gaussian."},
        {"counts", ""},
        {"method", "bootstrap"},
        {"bootstrap", 1000},
        {"form", "sound"},
        {"normalization", "linear_total"}}},
  };
}

// ---- subcommands ------------------------------------------------------------

int cmd_gen_config(const GlobalOptions& g, std::ostream& out) {
  const auto cfg = default_config();
  if (g.out_dir == ".") {
    out << cfg.dump(2) << '\n';
    return kExitOk;
  }
  const auto dir = prepare_out_dir(g.out_dir);
  auto f = open_output(dir / "config.json");
  f << cfg.dump(2) << '\n';
  out << "wrote " << (dir / "config.json").string() << '\n';
  return kExitOk;
}

int cmd_analyze_sweep(const GlobalOptions& g, const std::string& positional, std::optional<double> lambda0,
                      const std::vector<double>& fwhm_flag, std::ostream& out) {
  const json cfg = load_config(g.config_path);
  Section s(cfg.contains("analyze_sweep") ? &cfg["analyze_sweep"] : nullptr, "analyze_sweep");
  std::string path = s.text("sweep", "");
  double reference = s.number("reference_nm", 1300.0);
  auto fwhms = s.numbers("fwhm_nm", kDefaultFwhms);
  const double center_fwhm = s.number("center_fwhm_nm", 10.0);
  s.finish();
  if (!positional.empty()) path = positional;
  if (lambda0) reference = *lambda0;
  if (!fwhm_flag.empty()) fwhms = fwhm_flag;
  if (path.empty()) throw ConfigError("analyze-sweep needs a sweep file");
  for (double f : fwhms) {
    if (!(f >= 0.0)) throw ConfigError("FWHM values must be >= 0");
  }

  const auto sweep = load_sweep(path);
  const auto dir = prepare_out_dir(g.out_dir);
  DispersionReport report;
  try {
    report = analyze_sweep(sweep, reference, fwhms, center_fwhm);
  } catch (const std::logic_error& e) {
    throw ConfigError(e.what());
  }
  write_report_files(report, dir);
  out << "analyzed " << sweep.record_count() << " records (" << sweep.snapshots.size() << " snapshot(s)) -> "
      << dir.string() << '\n';
  return kExitOk;
}

int cmd_simulate_sweep(const GlobalOptions& g, std::ostream& out) {
  const json cfg = load_config(g.config_path);
  const auto seed = resolve_seed(cfg, g);
  Section s(cfg.contains("simulate_sweep") ? &cfg["simulate_sweep"] : nullptr, "simulate_sweep");
  DispersiveChannelParams p;
  p.grid.start_nm = s.number("start_nm", p.grid.start_nm);
  p.grid.step_nm = s.number("step_nm", p.grid.step_nm);
  p.grid.count = s.count("count", p.grid.count);
  p.plates = s.count("plates", p.plates);
  p.retardance_dispersion_rad_per_nm = s.number("retardance_dispersion_rad_per_nm", p.retardance_dispersion_rad_per_nm);
  p.center_nm = s.number("center_nm", p.center_nm);
  const auto snapshots = s.count("snapshots", 1);
  const double interval = s.number("interval_s", 3600.0);
  const auto label = s.text("label", "synthetic");
  const auto pm = parse_polarimeter(s.sub("polarimeter"));
  const auto drift = parse_drift(s.sub("drift"));
  s.finish();
  if (snapshots == 0) throw ConfigError("simulate_sweep.snapshots must be >= 1");
  if (!(interval > 0.0)) throw ConfigError("simulate_sweep.interval_s must be > 0");
  try {
    p.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  Rng channel_rng = seeded(seed, 1);
  Rng sweep_rng = seeded(seed, 2);
  const auto channel = synth_dispersive_channel(p, channel_rng, {}, drift);
  const auto sweep = simulate_sweep(channel, pm, snapshots, interval, sweep_rng, label);
  const auto dir = prepare_out_dir(g.out_dir);
  auto f = open_output(dir / "sweep.csv");
  write_sweep(sweep, f);
  out << "wrote " << sweep.record_count() << " records to " << (dir / "sweep.csv").string() << '\n';
  return kExitOk;
}

int cmd_rate_fidelity(const GlobalOptions& g, std::ostream& out) {
  const json cfg = load_config(g.config_path);
  const auto seed = resolve_seed(cfg, g);
  Section s(cfg.contains("rate_fidelity") ? &cfg["rate_fidelity"] : nullptr, "rate_fidelity");
  const auto rates = s.numbers("rates", kDefaultRates);
  const auto src = parse_source(s);
  MeasurementPlan plan;
  plan.dwell_s = s.number("dwell_s", 60.0);
  plan.coincidence_window_s = s.number("coincidence_window_s", plan.coincidence_window_s);
  const auto [det1, det2] = parse_detectors(s);
  const auto resamples = s.count("bootstrap", 1000);
  const auto opts = parse_bound_options(s);
  const auto loss = parse_loss(s);
  s.finish();
  plan.validate();
  if (rates.empty()) throw ConfigError("rate_fidelity.rates is empty");
  for (double r : rates) {
    if (!(r > 0.0 && r <= src.max_rate)) throw ConfigError("rate_fidelity rates must lie in (0, max_rate]");
  }
  const double t = transmission(total_loss_db(loss));

  const auto dir = prepare_out_dir(g.out_dir);
  auto f = open_output(dir / "rate_fidelity.csv");
  f << "rate,lower,upper,sigma_l,sigma_u,theory_F\n" << std::setprecision(10);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    Rng rng = seeded(seed, static_cast<std::uint32_t>(i));
    const auto counts = simulate_counts(state_at_rate(src, rates[i]), rates[i], t, det1, det2, plan, std::nullopt, rng);
    UncertaintyOptions u;
    u.resamples = resamples;
    u.seed = rng();
    const auto b = bounds_with_uncertainties(counts, u, opts);
    f << rates[i] << ',' << b.lower << ',' << b.upper << ',' << b.sigma_lower << ',' << b.sigma_upper << ','
      << fidelity_from_gsi(gsi_at_rate(src, rates[i])) << '\n';
  }
  out << "wrote " << rates.size() << " rate points to " << (dir / "rate_fidelity.csv").string() << '\n';
  return kExitOk;
}

int cmd_longrun(const GlobalOptions& g, std::ostream& out) {
  const json cfg = load_config(g.config_path);
  LongRunConfig lr;
  lr.seed = resolve_seed(cfg, g);
  Section s(cfg.contains("longrun") ? &cfg["longrun"] : nullptr, "longrun");
  lr.duration_s = s.number("duration_days", lr.duration_s / 86400.0) * 86400.0;
  lr.sampling_period_s = s.number("sampling_period_s", lr.sampling_period_s);
  lr.rate = s.number("rate", lr.rate);
  lr.source = parse_source(s);
  lr.plan.dwell_s = s.number("dwell_s", lr.plan.dwell_s);
  lr.wavelength_nm = s.number("wavelength_nm", lr.wavelength_nm);
  std::tie(lr.first_detector, lr.second_detector) = parse_detectors(s);
  lr.bounds = parse_bound_options(s);
  const double trailing_h = s.number("trailing_average_hours", 0.0);
  lr.loss = parse_loss(s);
  lr.drift = parse_drift(s.sub("drift"));
  lr.polarimeter = parse_polarimeter(s.sub("polarimeter"));
  lr.apc = parse_apc(s.sub("apc"));
  s.finish();
  if (!(trailing_h >= 0.0)) throw ConfigError("longrun.trailing_average_hours must be >= 0");
  try {
    lr.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("longrun: ") + e.what());
  }

  const auto result = run_long_term(longrun_channel(lr), lr);
  const auto dir = prepare_out_dir(g.out_dir);
  {
    auto f = open_output(dir / "timeseries.csv");
    write_time_series(result, f, trailing_h * 3600.0);
  }
  {
    auto f = open_output(dir / "cycles.csv");
    write_cycle_log(result, f);
  }
  const auto summary = to_json(summarize(result));
  {
    auto f = open_output(dir / "summary.json");
    f << summary.dump(2) << '\n';
  }
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_bounds(const GlobalOptions& g, const std::string& positional, std::ostream& out) {
  const json cfg = load_config(g.config_path);
  const auto seed = resolve_seed(cfg, g);
  Section s(cfg.contains("bounds") ? &cfg["bounds"] : nullptr, "bounds");
  std::string path = s.text("counts", "");
  const auto method = s.text("method", "bootstrap");
  UncertaintyOptions u;
  u.resamples = s.count("bootstrap", 1000);
  u.seed = seed;
  const auto opts = parse_bound_options(s);
  s.finish();
  if (!positional.empty()) path = positional;
  if (path.empty()) throw ConfigError("bounds needs a counts file");
  if (method == "bootstrap") {
    u.method = UncertaintyOptions::Method::kBootstrap;
  } else if (method == "gaussian") {
    u.method = UncertaintyOptions::Method::kGaussian;
  } else {
    throw ConfigError("bounds.method must be \"bootstrap\" or \"gaussian\"");
  }

  const auto counts = load_counts(path);
  FidelityBounds b;
  try {
    b = bounds_with_uncertainties(counts, u, opts);
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
  const auto report = to_json(b);
  const auto dir = prepare_out_dir(g.out_dir);
  auto f = open_output(dir / "bounds.json");
  f << report.dump(2) << '\n';
  out << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polarization-entanglement distribution toolkit", "polent"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--seed", g.seed, "Global seed (overrides the config)");
  app.add_option("--out", g.out_dir, "Output directory");

  auto* analyze = app.add_subcommand("analyze-sweep", "Rotation, fidelity and spectral analysis of a sweep CSV");
  std::string sweep_file;
  std::optional<double> lambda0;
  std::vector<double> fwhms;
  analyze->add_option("sweep", sweep_file, "Polarimeter sweep CSV");
  analyze->add_option("--lambda0", lambda0, "Reference wavelength (nm)");
  analyze->add_option("--fwhm", fwhms, "Spectral FWHM values (nm)")->delimiter(',');
  auto* simulate = app.add_subcommand("simulate-sweep", "Synthetic dispersive channel to sweep CSV");
  auto* rate = app.add_subcommand("rate-fidelity", "Fidelity bounds versus pair rate");
  auto* longrun = app.add_subcommand("longrun", "Multi-day compensated link simulation");
  auto* bounds = app.add_subcommand("bounds", "Fidelity bounds from a counts JSON file");
  std::string counts_file;
  bounds->add_option("counts", counts_file, "Counts JSON");
  auto* gen = app.add_subcommand("gen-config", "Print (or write to --out) the default configuration");
  for (auto* sub : {analyze, simulate, rate, longrun, bounds, gen}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*analyze) return cmd_analyze_sweep(g, sweep_file, lambda0, fwhms, out);
    if (*simulate) return cmd_simulate_sweep(g, out);
    if (*rate) return cmd_rate_fidelity(g, out);
    if (*longrun) return cmd_longrun(g, out);
    if (*bounds) return cmd_bounds(g, counts_file, out);
    if (*gen) return cmd_gen_config(g, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SweepError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const EstimationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::exception& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  }
  return kExitInput;
}

}  // namespace polent::cli
