#include "polent/dispersion.hpp"

#include "polent/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace polent {

namespace {

constexpr double kGridEps = 1e-9;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where, const char* column) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw SweepError(SweepError::Kind::kSchema, where + ": column '" + column + "' is not a number: '" + s + "'");
  }
  return v;
}

std::string fmt_nm(double nm) {
  std::ostringstream os;
  os << nm;
  return os.str();
}

struct RawRecord {
  double wavelength_nm;
  Probe probe;
  StokesVector stokes;
  std::size_t line;
};

const char* probe_name(Probe p) {
  switch (p) {
    case Probe::H: return "H";
    case Probe::D: return "D";
    case Probe::R: return "R";
  }
  return "?";
}

std::size_t index_of(std::span<const WavelengthRotation> rotations, double nm) {
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    if (std::abs(rotations[i].wavelength_nm - nm) < kGridEps) return i;
  }
  throw std::invalid_argument("wavelength " + fmt_nm(nm) + " nm is not on the sweep grid");
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << header << '\n' << std::setprecision(12);
  for (const auto& [x, y] : rows) out << x << ',' << y << '\n';
}

}  // namespace

std::size_t PolarimeterSweep::record_count() const {
  std::size_t n = 0;
  for (const auto& s : snapshots) n += 3 * s.points.size();
  return n;
}

PolarimeterSweep parse_sweep(std::istream& in, const std::string& source) {
  PolarimeterSweep sweep;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  // timestamp -> records, in timestamp order
  std::map<double, std::vector<RawRecord>> by_time;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (t.front() == '#') {
      const auto pos = t.find("label:");
      if (pos != std::string::npos) sweep.label = trim(std::string_view(t).substr(pos + 6));
      continue;
    }
    if (!have_header) {
      if (t != kSweepHeader) {
        throw SweepError(SweepError::Kind::kSchema,
                         where + ": expected header '" + std::string(kSweepHeader) + "', got '" + t + "'");
      }
      have_header = true;
      continue;
    }
    const auto f = split_csv(t);
    if (f.size() != 7) {
      throw SweepError(SweepError::Kind::kSchema,
                       where + ": expected 7 columns, got " + std::to_string(f.size()));
    }
    const double ts = parse_number(f[0], where, "timestamp_s");
    const double nm = parse_number(f[1], where, "wavelength_nm");
    Probe probe;
    if (f[2] == "H") {
      probe = Probe::H;
    } else if (f[2] == "D") {
      probe = Probe::D;
    } else if (f[2] == "R") {
      probe = Probe::R;
    } else {
      throw SweepError(SweepError::Kind::kSchema, where + ": probe must be H, D or R, got '" + f[2] + "'");
    }
    const double s1 = parse_number(f[3], where, "s1");
    const double s2 = parse_number(f[4], where, "s2");
    const double s3 = parse_number(f[5], where, "s3");
    const double dop = parse_number(f[6], where, "dop");
    if (dop < 0.0 || dop > 1.0 + kGeometryTol) {
      throw SweepError(SweepError::Kind::kSchema, where + ": dop must lie in [0, 1]");
    }
    const Vector3 v(s1, s2, s3);
    if (v.squaredNorm() > 1.0 + 1e-6) {
      throw SweepError(SweepError::Kind::kSchema, where + ": Stokes vector lies outside the Poincare sphere");
    }
    const Vector3 clipped = v.squaredNorm() > 1.0 ? Vector3(v.normalized()) : v;
    by_time[ts].push_back({nm, probe, StokesVector(clipped), line_no});
  }

  if (by_time.empty()) throw SweepError(SweepError::Kind::kEmpty, source + ": empty sweep");

  for (const auto& [ts, records] : by_time) {
    // Probes may be interleaved per wavelength or swept one after another;
    // either way each probe's own wavelength sequence must increase.
    std::map<long long, std::size_t> slot;  // wavelength key -> point index
    std::vector<SweepPoint> points;
    std::vector<std::array<bool, 3>> seen;
    std::array<double, 3> last{-1e300, -1e300, -1e300};
    for (const auto& rec : records) {
      const auto p = static_cast<std::size_t>(rec.probe);
      const std::string where = source + ":" + std::to_string(rec.line);
      if (rec.wavelength_nm < last[p] - kGridEps) {
        throw SweepError(SweepError::Kind::kNonMonotone,
                         where + ": wavelength " + fmt_nm(rec.wavelength_nm) + " nm breaks the increasing " +
                             probe_name(rec.probe) + " sweep at t=" + fmt_nm(ts) + " s");
      }
      last[p] = rec.wavelength_nm;
      const auto key = static_cast<long long>(std::llround(rec.wavelength_nm * 1e6));
      auto [it, inserted] = slot.try_emplace(key, points.size());
      if (inserted) {
        points.push_back({rec.wavelength_nm, {}});
        seen.push_back({false, false, false});
      }
      const std::size_t i = it->second;
      if (seen[i][p]) {
        throw SweepError(SweepError::Kind::kDuplicateProbe,
                         where + ": duplicate probe " + probe_name(rec.probe) + " at " + fmt_nm(rec.wavelength_nm) +
                             " nm (t=" + fmt_nm(ts) + " s)");
      }
      seen[i][p] = true;
      points[i].responses[p] = rec.stokes;
    }
    SweepSnapshot snap;
    snap.timestamp_s = ts;
    for (const auto& [key, i] : slot) {
      for (std::size_t p = 0; p < 3; ++p) {
        if (!seen[i][p]) {
          throw SweepError(SweepError::Kind::kMissingProbe,
                           source + ": missing probe " + probe_name(static_cast<Probe>(p)) + " at " +
                               fmt_nm(points[i].wavelength_nm) + " nm (t=" + fmt_nm(ts) + " s)");
        }
      }
      snap.points.push_back(points[i]);
    }
    sweep.snapshots.push_back(std::move(snap));
  }
  return sweep;
}

PolarimeterSweep load_sweep(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sweep file " + path.string());
  return parse_sweep(in, path.string());
}

void write_sweep(const PolarimeterSweep& sweep, std::ostream& out) {
  if (!sweep.label.empty()) out << "# label: " << sweep.label << '\n';
  out << kSweepHeader << '\n' << std::setprecision(17);
  for (const auto& snap : sweep.snapshots) {
    for (const auto& pt : snap.points) {
      for (std::size_t p = 0; p < 3; ++p) {
        const auto& s = pt.responses[p];
        out << snap.timestamp_s << ',' << pt.wavelength_nm << ',' << probe_name(static_cast<Probe>(p)) << ','
            << s.s1() << ',' << s.s2() << ',' << s.s3() << ',' << s.dop() << '\n';
      }
    }
  }
}

SweepSnapshot simulate_snapshot(const FiberChannel& ch, const PolarimeterModel& pm, double timestamp_s, Rng& rng) {
  SweepSnapshot snap;
  snap.timestamp_s = timestamp_s;
  const auto probes = probe_frame();
  for (std::size_t i = 0; i < ch.grid().count; ++i) {
    SweepPoint pt;
    pt.wavelength_nm = ch.grid().at(i);
    for (std::size_t p = 0; p < 3; ++p) pt.responses[p] = measure_rotated(ch.rotation(i), probes[p], pm, 1, rng);
    snap.points.push_back(pt);
  }
  return snap;
}

PolarimeterSweep simulate_sweep(FiberChannel ch, const PolarimeterModel& pm, std::size_t snapshots,
                                double interval_s, Rng& rng, std::string label) {
  pm.validate();
  if (snapshots == 0) throw std::invalid_argument("a sweep needs at least one snapshot");
  if (snapshots > 1 && !(interval_s > 0.0)) throw std::invalid_argument("snapshot interval must be positive");
  PolarimeterSweep sweep;
  sweep.label = std::move(label);
  for (std::size_t k = 0; k < snapshots; ++k) {
    if (k > 0) ch = step_drift(ch, interval_s, rng);
    sweep.snapshots.push_back(simulate_snapshot(ch, pm, static_cast<double>(k) * interval_s, rng));
  }
  return sweep;
}

std::vector<WavelengthRotation> rotations_vs_wavelength(const PolarimeterSweep& sweep, std::size_t snapshot) {
  if (snapshot >= sweep.snapshots.size()) throw std::out_of_range("sweep snapshot index out of range");
  std::vector<WavelengthRotation> out;
  for (const auto& pt : sweep.snapshots[snapshot].points) {
    try {
      const auto r = estimate_rotation(std::span<const StokesVector, 3>(pt.responses));
      out.push_back({pt.wavelength_nm, r, rotation_angle(r)});
    } catch (const EstimationError& e) {
      throw EstimationError("at " + fmt_nm(pt.wavelength_nm) + " nm: " + e.what());
    }
  }
  return out;
}

PoincareRotation chordal_mean(std::span<const PoincareRotation> rotations) {
  if (rotations.empty()) throw std::invalid_argument("mean of an empty rotation set");
  Matrix3 m = Matrix3::Zero();
  for (const auto& r : rotations) m += r.matrix();
  m /= static_cast<double>(rotations.size());
  Eigen::JacobiSVD<Matrix3> svd(m);
  if (svd.singularValues().minCoeff() < 1e-9) {
    throw EstimationError("rotation mean is degenerate (entrywise mean is singular)");
  }
  return PoincareRotation::project(m);
}

std::vector<WavelengthValue> rotation_relative_to_mean(std::span<const WavelengthRotation> rotations) {
  if (rotations.size() < 2) throw std::invalid_argument("relative rotation needs at least two wavelengths");
  std::vector<PoincareRotation> rs;
  rs.reserve(rotations.size());
  for (const auto& w : rotations) rs.push_back(w.rotation);
  const PoincareRotation mean_t = chordal_mean(rs).transpose();
  std::vector<WavelengthValue> out;
  for (const auto& w : rotations) out.push_back({w.wavelength_nm, rotation_angle(mean_t * w.rotation)});
  return out;
}

std::vector<WavelengthValue> rotation_per_nm(std::span<const WavelengthRotation> rotations) {
  std::vector<WavelengthValue> out;
  for (std::size_t i = 0; i + 1 < rotations.size(); ++i) {
    const double step = rotations[i + 1].wavelength_nm - rotations[i].wavelength_nm;
    if (!(step > 0.0)) throw std::invalid_argument("rotation per nm needs increasing wavelengths");
    out.push_back({0.5 * (rotations[i].wavelength_nm + rotations[i + 1].wavelength_nm),
                   rotation_angle(rotations[i].rotation.transpose() * rotations[i + 1].rotation) / step});
  }
  return out;
}

std::vector<WavelengthValue> corrected_fidelity_curve(std::span<const WavelengthRotation> rotations,
                                                      double reference_nm) {
  const auto ref_t = rotations[index_of(rotations, reference_nm)].rotation.transpose();
  std::vector<WavelengthValue> out;
  out.reserve(rotations.size());
  for (const auto& w : rotations) {
    out.push_back({w.wavelength_nm, fidelity_from_residual_rotation(rotation_angle(ref_t * w.rotation))});
  }
  return out;
}

double spectral_weighted_fidelity(std::span<const WavelengthValue> curve, double center_nm, double fwhm_nm) {
  if (curve.empty()) throw std::invalid_argument("spectral average of an empty curve");
  if (!(fwhm_nm >= 0.0)) throw std::invalid_argument("FWHM must be non-negative");
  if (center_nm < curve.front().wavelength_nm - kGridEps || center_nm > curve.back().wavelength_nm + kGridEps) {
    throw std::invalid_argument("spectral center " + fmt_nm(center_nm) + " nm lies outside the grid");
  }
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (std::abs(curve[i].wavelength_nm - center_nm) < std::abs(curve[nearest].wavelength_nm - center_nm)) nearest = i;
  }
  if (fwhm_nm == 0.0 || curve.size() == 1) return curve[nearest].value;

  const double sigma = fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double lo = i > 0 ? curve[i - 1].wavelength_nm : curve[i].wavelength_nm;
    const double hi = i + 1 < curve.size() ? curve[i + 1].wavelength_nm : curve[i].wavelength_nm;
    const double trap = 0.5 * (hi - lo);
    const double d = (curve[i].wavelength_nm - center_nm) / sigma;
    const double w = trap * std::exp(-0.5 * d * d);
    num += w * curve[i].value;
    den += w;
  }
  if (!(den > 0.0)) return curve[nearest].value;
  return num / den;
}

FidelityMap temporal_fidelity_map(const PolarimeterSweep& sweep) {
  if (sweep.snapshots.size() < 2) throw std::invalid_argument("temporal map needs at least two snapshots");
  const auto& first = sweep.snapshots.front().points;
  for (const auto& snap : sweep.snapshots) {
    bool same = snap.points.size() == first.size();
    for (std::size_t i = 0; same && i < first.size(); ++i) {
      same = std::abs(snap.points[i].wavelength_nm - first[i].wavelength_nm) < kGridEps;
    }
    if (!same) {
      throw SweepError(SweepError::Kind::kGridMismatch,
                       "wavelength grid at t=" + fmt_nm(snap.timestamp_s) + " s differs from the first snapshot");
    }
  }
  FidelityMap map;
  for (const auto& pt : first) map.wavelengths_nm.push_back(pt.wavelength_nm);
  map.fidelity.resize(static_cast<Eigen::Index>(first.size()), static_cast<Eigen::Index>(sweep.snapshots.size()));
  const auto initial = rotations_vs_wavelength(sweep, 0);
  for (std::size_t t = 0; t < sweep.snapshots.size(); ++t) {
    map.timestamps_s.push_back(sweep.snapshots[t].timestamp_s);
    const auto now = t == 0 ? initial : rotations_vs_wavelength(sweep, t);
    for (std::size_t i = 0; i < now.size(); ++i) {
      const double theta = rotation_angle(initial[i].rotation.transpose() * now[i].rotation);
      map.fidelity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          fidelity_from_residual_rotation(theta);
    }
  }
  return map;
}

DispersionReport analyze_sweep(const PolarimeterSweep& sweep, double reference_nm, std::span<const double> fwhms_nm,
                               double center_fwhm_nm) {
  DispersionReport r;
  r.label = sweep.label;
  r.reference_nm = reference_nm;
  r.center_fwhm_nm = center_fwhm_nm;
  r.rotations = rotations_vs_wavelength(sweep, 0);
  r.relative_to_mean = rotation_relative_to_mean(r.rotations);
  r.per_nm = rotation_per_nm(r.rotations);
  r.corrected_fidelity = corrected_fidelity_curve(r.rotations, reference_nm);
  for (double fwhm : fwhms_nm) {
    r.spectral.push_back({fwhm, spectral_weighted_fidelity(r.corrected_fidelity, reference_nm, fwhm)});
  }
  for (const auto& w : r.rotations) {
    const auto curve = corrected_fidelity_curve(r.rotations, w.wavelength_nm);
    r.fidelity_vs_center.push_back({w.wavelength_nm, spectral_weighted_fidelity(curve, w.wavelength_nm, center_fwhm_nm)});
  }
  if (sweep.snapshots.size() > 1) r.temporal = temporal_fidelity_map(sweep);
  return r;
}

nlohmann::json to_json(const DispersionReport& r) {
  using nlohmann::json;
  json j;
  j["label"] = r.label;
  j["reference_nm"] = r.reference_nm;
  json rot = json::array();
  for (const auto& w : r.rotations) {
    json m = json::array();
    for (int i = 0; i < 3; ++i) {
      m.push_back({w.rotation.matrix()(i, 0), w.rotation.matrix()(i, 1), w.rotation.matrix()(i, 2)});
    }
    rot.push_back({{"wavelength_nm", w.wavelength_nm}, {"angle_rad", w.angle}, {"matrix", m}});
  }
  j["rotations"] = rot;
  const auto series = [](const std::vector<WavelengthValue>& v, const char* key) {
    json a = json::array();
    for (const auto& p : v) a.push_back({{"wavelength_nm", p.wavelength_nm}, {key, p.value}});
    return a;
  };
  j["relative_to_mean"] = series(r.relative_to_mean, "angle_rad");
  j["rotation_per_nm"] = series(r.per_nm, "angle_rad_per_nm");
  j["corrected_fidelity"] = series(r.corrected_fidelity, "fidelity");
  json spectral = json::array();
  for (const auto& s : r.spectral) spectral.push_back({{"fwhm_nm", s.fwhm_nm}, {"fidelity", s.fidelity}});
  j["spectral_fidelity"] = spectral;
  j["fidelity_vs_center"] = {{"fwhm_nm", r.center_fwhm_nm}, {"points", series(r.fidelity_vs_center, "fidelity")}};
  if (r.temporal) {
    json t;
    t["timestamps_s"] = r.temporal->timestamps_s;
    t["wavelengths_nm"] = r.temporal->wavelengths_nm;
    json rows = json::array();
    for (Eigen::Index i = 0; i < r.temporal->fidelity.rows(); ++i) {
      std::vector<double> row(r.temporal->fidelity.cols());
      for (Eigen::Index k = 0; k < r.temporal->fidelity.cols(); ++k) row[k] = r.temporal->fidelity(i, k);
      rows.push_back(row);
    }
    t["fidelity"] = rows;
    j["temporal"] = t;
  }
  return j;
}

void write_report_files(const DispersionReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto pairs = [](const std::vector<WavelengthValue>& v) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : v) out.emplace_back(p.wavelength_nm, p.value);
    return out;
  };
  std::vector<std::pair<double, double>> fig2a;
  for (const auto& w : r.rotations) fig2a.emplace_back(w.wavelength_nm, w.angle);
  write_csv(dir / "fig2a.csv", "wavelength_nm,rotation_rad", fig2a);
  write_csv(dir / "fig2b.csv", "wavelength_nm,rotation_rel_mean_rad", pairs(r.relative_to_mean));
  write_csv(dir / "fig2c.csv", "wavelength_mid_nm,rotation_per_nm_rad", pairs(r.per_nm));
  write_csv(dir / "fig2d.csv", "wavelength_nm,fidelity", pairs(r.corrected_fidelity));
  std::vector<std::pair<double, double>> fig2e;
  for (const auto& s : r.spectral) fig2e.emplace_back(s.fwhm_nm, s.fidelity);
  write_csv(dir / "fig2e.csv", "fwhm_nm,fidelity", fig2e);
  write_csv(dir / "fig2f.csv", "center_nm,fidelity", pairs(r.fidelity_vs_center));
  if (r.temporal) {
    std::ofstream out(dir / "fig3.csv");
    if (!out) throw InputError("cannot write " + (dir / "fig3.csv").string());
    out << "timestamp_s,wavelength_nm,fidelity\n" << std::setprecision(12);
    for (Eigen::Index t = 0; t < r.temporal->fidelity.cols(); ++t) {
      for (Eigen::Index i = 0; i < r.temporal->fidelity.rows(); ++i) {
        out << r.temporal->timestamps_s[t] << ',' << r.temporal->wavelengths_nm[i] << ','
            << r.temporal->fidelity(i, t) << '\n';
      }
    }
  }
  std::ofstream js(dir / "report.json");
  if (!js) throw InputError("cannot write " + (dir / "report.json").string());
  js << to_json(r).dump(2) << '\n';
}

}  // namespace polent
