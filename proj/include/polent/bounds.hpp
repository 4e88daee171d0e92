#pragma once

// Bell-state fidelity bounds from eight coincidence counts.

#include "polent/polarization.hpp"
#include "polent/source.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace polent {

struct BoundOptions {
  enum class Form {
    // L1/L3 use (C_HH + C_VV - 2 sqrt(C_HH C_VV)) / (2N), which holds for every state.
    kSound,
    // L1/L3 = (C_HH + C_VV - sqrt(C_HH C_VV)) / N, without the factor of 2. Violated by some states.
    kLiteral,
  };
  enum class Normalization {
    kLinearTotal,  // N = C_HH + C_HV + C_VH + C_VV for every expression
    kPerBasis,     // diagonal counts rescaled to the linear-basis total first
  };
  Form form = Form::kSound;
  Normalization normalization = Normalization::kLinearTotal;
};

struct FidelityBounds {
  static constexpr std::array<const char*, 8> kNames = {"L1", "U1", "L2", "U2", "L3", "U3", "L4", "U4"};

  double lower = 0.0;
  double upper = 1.0;
  double sigma_lower = 0.0;
  double sigma_upper = 0.0;
  // Raw values, in kNames order, before any clamping.
  std::array<double, 8> expressions{};
  // Set when max(L) > min(U) (only possible with noisy counts); lower and
  // upper are then both the midpoint.
  bool crossed = false;

  double expression(const std::string& name) const;
};

/// Throws std::invalid_argument when N = 0 or a required mode is missing.
FidelityBounds bounds_from_counts(const CoincidenceCounts& c, const BoundOptions& opt = {});

/// Same expressions on real-valued counts, e.g. exact probabilities.
FidelityBounds bounds_from_values(const std::array<double, 8>& hh_hv_vh_vv_dd_da_ad_aa, const BoundOptions& opt = {});

/// Exact mode probabilities of rho, in the order taken by bounds_from_values.
std::array<double, 8> bounding_probabilities(const TwoQubitState& rho);

struct UncertaintyOptions {
  enum class Method { kBootstrap, kGaussian };
  Method method = Method::kBootstrap;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
};

struct BoundSigmas {
  double lower = 0.0;
  double upper = 0.0;
};

/// Parametric bootstrap (each count resampled as Poisson(observed)) or
/// first-order propagation through the active bounds.
BoundSigmas bound_uncertainties(const CoincidenceCounts& c, const UncertaintyOptions& u = {},
                                const BoundOptions& opt = {});

/// bounds_from_counts with sigma_lower / sigma_upper filled in.
FidelityBounds bounds_with_uncertainties(const CoincidenceCounts& c, const UncertaintyOptions& u = {},
                                         const BoundOptions& opt = {});

/// {"lower", "upper", "sigma_lower", "sigma_upper", "expressions": {...}, "crossed"}
nlohmann::json to_json(const FidelityBounds& b);

}  // namespace polent
