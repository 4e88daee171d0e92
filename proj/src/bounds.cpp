#include "polent/bounds.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace polent {

namespace {

using M = MeasurementMode;

constexpr std::array<ModePair, 8> kOrder = {{{M::H, M::H},
                                             {M::H, M::V},
                                             {M::V, M::H},
                                             {M::V, M::V},
                                             {M::D, M::D},
                                             {M::D, M::A},
                                             {M::A, M::D},
                                             {M::A, M::A}}};

std::array<double, 8> extract(const CoincidenceCounts& c) {
  std::array<double, 8> v{};
  for (std::size_t i = 0; i < kOrder.size(); ++i) {
    const auto it = c.counts.find(kOrder[i]);
    if (it == c.counts.end()) {
      throw std::invalid_argument("fidelity bounds need the " + kOrder[i].name() + " count");
    }
    if (it->second < 0) throw std::invalid_argument("negative count for " + kOrder[i].name());
    v[i] = static_cast<double>(it->second);
  }
  return v;
}

double sqrt_product(double a, double b) { return std::sqrt(std::max(0.0, a) * std::max(0.0, b)); }

}  // namespace

double FidelityBounds::expression(const std::string& name) const {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (name == kNames[i]) return expressions[i];
  }
  throw std::out_of_range("unknown bound expression " + name);
}

FidelityBounds bounds_from_values(const std::array<double, 8>& v, const BoundOptions& opt) {
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("counts must be finite and non-negative");
  }
  double hh = v[0], hv = v[1], vh = v[2], vv = v[3];
  double dd = v[4], da = v[5], ad = v[6], aa = v[7];
  const double n = hh + hv + vh + vv;
  if (!(n > 0.0)) throw std::invalid_argument("linear-basis total N must be > 0");
  if (opt.normalization == BoundOptions::Normalization::kPerBasis) {
    const double nd = dd + da + ad + aa;
    if (!(nd > 0.0)) throw std::invalid_argument("diagonal-basis total must be > 0 for per-basis normalization");
    const double s = n / nd;
    dd *= s;
    da *= s;
    ad *= s;
    aa *= s;
  }

  FidelityBounds b;
  auto& e = b.expressions;
  if (opt.form == BoundOptions::Form::kLiteral) {
    e[0] = (hh + vv - sqrt_product(hh, vv)) / n;
    e[4] = (dd + aa - sqrt_product(dd, aa)) / n;
  } else {
    e[0] = (hh + vv - 2.0 * sqrt_product(hh, vv)) / (2.0 * n);
    e[4] = (dd + aa - 2.0 * sqrt_product(dd, aa)) / (2.0 * n);
  }
  e[1] = (hh + vv + sqrt_product(hh, vv)) / n;
  e[5] = (dd + aa + sqrt_product(dd, aa)) / n;
  const double sum = hh + vv + dd + aa;
  e[2] = (sum - da - ad - 2.0 * sqrt_product(hv, vh)) / (2.0 * n);
  e[3] = (sum - da - ad + 2.0 * sqrt_product(hv, vh)) / (2.0 * n);
  e[6] = (sum - hv - vh - 2.0 * sqrt_product(da, ad)) / (2.0 * n);
  e[7] = (sum - hv - vh + 2.0 * sqrt_product(da, ad)) / (2.0 * n);

  const double max_l = std::max({e[0], e[2], e[4], e[6]});
  const double min_u = std::min({e[1], e[3], e[5], e[7]});
  double lower = std::clamp(max_l, 0.0, 1.0);
  double upper = std::clamp(min_u, 0.0, 1.0);
  if (lower > upper) {
    b.crossed = true;
    lower = upper = 0.5 * (lower + upper);
  }
  b.lower = lower;
  b.upper = upper;
  return b;
}

FidelityBounds bounds_from_counts(const CoincidenceCounts& c, const BoundOptions& opt) {
  return bounds_from_values(extract(c), opt);
}

std::array<double, 8> bounding_probabilities(const TwoQubitState& rho) {
  std::array<double, 8> p{};
  for (std::size_t i = 0; i < kOrder.size(); ++i) p[i] = coincidence_probability(rho, kOrder[i].first, kOrder[i].second);
  return p;
}

BoundSigmas bound_uncertainties(const CoincidenceCounts& c, const UncertaintyOptions& u, const BoundOptions& opt) {
  const auto v = extract(c);
  if (u.method == UncertaintyOptions::Method::kGaussian) {
    // Central differences of the clamped bounds; var(C) = C for Poisson counts.
    BoundSigmas s;
    double var_l = 0.0;
    double var_u = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0.0) continue;
      const double h = std::max(1e-3, 1e-4 * v[i]);
      auto plus = v;
      auto minus = v;
      plus[i] += h;
      minus[i] = std::max(0.0, v[i] - h);
      const double width = plus[i] - minus[i];
      FidelityBounds bp, bm;
      try {
        bp = bounds_from_values(plus, opt);
        bm = bounds_from_values(minus, opt);
      } catch (const std::invalid_argument&) {
        continue;
      }
      const double dl = (bp.lower - bm.lower) / width;
      const double du = (bp.upper - bm.upper) / width;
      var_l += dl * dl * v[i];
      var_u += du * du * v[i];
    }
    s.lower = std::sqrt(var_l);
    s.upper = std::sqrt(var_u);
    return s;
  }

  if (u.resamples < 2) throw std::invalid_argument("bootstrap needs at least 2 resamples");
  Rng rng(u.seed);
  std::vector<double> lows;
  std::vector<double> ups;
  lows.reserve(u.resamples);
  ups.reserve(u.resamples);
  for (std::size_t r = 0; r < u.resamples; ++r) {
    std::array<double, 8> sample{};
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > 0.0) {
        std::poisson_distribution<std::int64_t> poisson(v[i]);
        sample[i] = static_cast<double>(poisson(rng));
      }
    }
    try {
      const auto b = bounds_from_values(sample, opt);
      lows.push_back(b.lower);
      ups.push_back(b.upper);
    } catch (const std::invalid_argument&) {
      // A resample with N = 0 has no bounds; it carries no information.
    }
  }
  auto stddev = [](const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    double mean = 0.0;
    for (double xi : x) mean += xi;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double xi : x) ss += (xi - mean) * (xi - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
  };
  return {stddev(lows), stddev(ups)};
}

FidelityBounds bounds_with_uncertainties(const CoincidenceCounts& c, const UncertaintyOptions& u,
                                         const BoundOptions& opt) {
  auto b = bounds_from_counts(c, opt);
  const auto s = bound_uncertainties(c, u, opt);
  b.sigma_lower = s.lower;
  b.sigma_upper = s.upper;
  return b;
}

nlohmann::json to_json(const FidelityBounds& b) {
  nlohmann::json expr = nlohmann::json::object();
  for (std::size_t i = 0; i < b.expressions.size(); ++i) expr[FidelityBounds::kNames[i]] = b.expressions[i];
  return {{"lower", b.lower},
          {"upper", b.upper},
          {"sigma_lower", b.sigma_lower},
          {"sigma_upper", b.sigma_upper},
          {"expressions", expr},
          {"crossed", b.crossed}};
}

}  // namespace polent
