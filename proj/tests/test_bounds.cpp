#include "oracles.hpp"
#include "polent/bounds.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

using namespace polent;

namespace {

CoincidenceCounts make_counts(const std::array<std::int64_t, 8>& v) {
  CoincidenceCounts c;
  const auto& modes = fidelity_bounding_modes();
  for (std::size_t i = 0; i < 8; ++i) c.counts[modes[i]] = v[i];
  return c;
}

std::array<double, 8> scaled(const std::array<double, 8>& p, double n) {
  std::array<double, 8> out{};
  for (std::size_t i = 0; i < 8; ++i) out[i] = p[i] * n;
  return out;
}

const BoundOptions kLiteral{BoundOptions::Form::kLiteral, BoundOptions::Normalization::kLinearTotal};

CoincidenceCounts poisson_counts(const std::array<double, 8>& p, double n, Rng& rng) {
  std::array<std::int64_t, 8> v{};
  for (std::size_t i = 0; i < 8; ++i) v[i] = std::poisson_distribution<std::int64_t>(p[i] * n)(rng);
  return make_counts(v);
}

}  // namespace

TEST(Bounds, PerfectBellCounts) {
  const auto b = bounds_from_counts(make_counts({5000, 0, 0, 5000, 5000, 0, 0, 5000}));
  EXPECT_DOUBLE_EQ(b.lower, 1.0);
  EXPECT_DOUBLE_EQ(b.upper, 1.0);
  EXPECT_DOUBLE_EQ(b.expression("L2"), 1.0);
  EXPECT_DOUBLE_EQ(b.expression("U2"), 1.0);
  EXPECT_DOUBLE_EQ(b.expression("U1"), 1.5);
  EXPECT_FALSE(b.crossed);
}

TEST(Bounds, WhiteNoise) {
  const auto c = make_counts({2500, 2500, 2500, 2500, 2500, 2500, 2500, 2500});
  const double truth = oracle::bell_fidelity(oracle::werner(0.0));
  const auto lit = bounds_from_counts(c, kLiteral);
  EXPECT_DOUBLE_EQ(lit.lower, 0.25);
  EXPECT_DOUBLE_EQ(lit.upper, 0.5);
  const auto sound = bounds_from_counts(c);
  EXPECT_DOUBLE_EQ(sound.lower, 0.0);
  EXPECT_DOUBLE_EQ(sound.upper, 0.5);
  EXPECT_LE(sound.lower, truth);
  EXPECT_GE(sound.upper, truth);
}

TEST(Bounds, WernerExactProbabilities) {
  const double n = 1e6;
  const auto p = bounding_probabilities(werner_state(0.9));
  const std::array<double, 8> expected = {0.475, 0.025, 0.025, 0.475, 0.475, 0.025, 0.025, 0.475};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(p[i], expected[i], 1e-12);
  for (const auto& opt : {BoundOptions{}, kLiteral}) {
    const auto b = bounds_from_values(scaled(p, n), opt);
    EXPECT_NEAR(b.lower, 0.9, 1e-12);
    EXPECT_NEAR(b.upper, 0.95, 1e-12);
    EXPECT_LE(b.lower, oracle::bell_fidelity(oracle::werner(0.9)));
    EXPECT_GE(b.upper, oracle::bell_fidelity(oracle::werner(0.9)));
  }
}

TEST(Bounds, ProbabilitiesMatchOracle) {
  Rng rng(1);
  const auto rho = random_density_matrix(rng);
  const auto p = bounding_probabilities(rho);
  oracle::Mat4 o{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) o[i][j] = rho.matrix()(i, j);
  const std::array<std::array<double, 3>, 4> dirs = {{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}}};
  const std::array<std::pair<int, int>, 8> idx = {{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}}};
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& a = dirs[idx[k].first];
    const auto& b = dirs[idx[k].second];
    const double want = oracle::expectation(o, oracle::kron(oracle::jones(a[0], a[1], a[2]), oracle::jones(b[0], b[1], b[2])));
    EXPECT_NEAR(p[k], want, 1e-12) << k;
  }
}

TEST(Bounds, SoundOnRandomStates) {
  Rng rng(2);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto rho = random_density_matrix(rng);
    const auto b = bounds_from_values(scaled(bounding_probabilities(rho), 1e6));
    const double f = fidelity_to_phi_plus(rho);
    if (b.lower > f + 1e-12 || b.upper < f - 1e-12) ++violations;
    EXPECT_LE(b.lower, b.upper);
    for (double e : b.expressions) EXPECT_TRUE(std::isfinite(e));
  }
  EXPECT_EQ(violations, 0);
}

TEST(Bounds, LiteralFormIsNotSound) {
  // |HH> has F = 1/2 but the original L1 evaluates to 1.
  const auto b = bounds_from_values({1, 0, 0, 0, 0.25, 0.25, 0.25, 0.25}, kLiteral);
  EXPECT_DOUBLE_EQ(b.expression("L1"), 1.0);
  EXPECT_GT(b.lower, 0.5);
  const auto s = bounds_from_values({1, 0, 0, 0, 0.25, 0.25, 0.25, 0.25});
  EXPECT_LE(s.lower, 0.5);
  EXPECT_GE(s.upper, 0.5);
}

TEST(Bounds, ScaleInvariance) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto p = bounding_probabilities(random_density_matrix(rng));
    const auto a = bounds_from_values(scaled(p, 1.0));
    const auto b = bounds_from_values(scaled(p, 7.3e5));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(a.expressions[i], b.expressions[i], 1e-12);
  }
  const auto c1 = bounds_from_counts(make_counts({470, 30, 20, 480, 460, 40, 35, 465}));
  const auto c2 = bounds_from_counts(make_counts({4700, 300, 200, 4800, 4600, 400, 350, 4650}));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(c1.expressions[i], c2.expressions[i], 1e-12);
}

TEST(Bounds, ClampedAndOrdered) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto p = bounding_probabilities(random_density_matrix(rng));
    const auto c = poisson_counts(p, 50.0, rng);
    try {
      const auto b = bounds_from_counts(c);
      EXPECT_GE(b.lower, 0.0);
      EXPECT_LE(b.upper, 1.0);
      EXPECT_LE(b.lower, b.upper);
      if (b.crossed) EXPECT_DOUBLE_EQ(b.lower, b.upper);
    } catch (const std::invalid_argument&) {
      // N = 0 at very low counts
    }
  }
}

TEST(Bounds, Errors) {
  EXPECT_THROW(bounds_from_counts(make_counts({0, 0, 0, 0, 10, 0, 0, 10})), std::invalid_argument);
  auto c = make_counts({10, 0, 0, 10, 10, 0, 0, 10});
  c.counts.erase(ModePair::parse("AD"));
  EXPECT_THROW(bounds_from_counts(c), std::invalid_argument);
  EXPECT_THROW(bounds_from_values({1, 0, 0, 1, -1, 0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(bounds_from_counts(make_counts({5, 0, 0, 5, 5, 0, 0, 5})).expression("L9"), std::out_of_range);
  const BoundOptions per{BoundOptions::Form::kSound, BoundOptions::Normalization::kPerBasis};
  EXPECT_THROW(bounds_from_counts(make_counts({10, 0, 0, 10, 0, 0, 0, 0}), per), std::invalid_argument);
}

TEST(Bounds, PerBasisNormalization) {
  // Diagonal basis acquired with half the flux: linear_total reads it as noise, per_basis does not.
  const auto c = make_counts({5000, 0, 0, 5000, 2500, 0, 0, 2500});
  const auto lin = bounds_from_counts(c);
  const auto per = bounds_from_counts(c, {BoundOptions::Form::kSound, BoundOptions::Normalization::kPerBasis});
  EXPECT_DOUBLE_EQ(per.lower, 1.0);
  EXPECT_DOUBLE_EQ(per.upper, 1.0);
  EXPECT_LT(lin.lower, per.lower);
}

TEST(Uncertainty, CoverageAtHighCounts) {
  Rng rng(5);
  int covered = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto rho = random_density_matrix(rng);
    const auto p = bounding_probabilities(rho);
    double lin = p[0] + p[1] + p[2] + p[3];
    const auto c = poisson_counts(p, 1e5 / lin, rng);
    const auto b = bounds_with_uncertainties(c, {UncertaintyOptions::Method::kGaussian, 0, 0});
    const double f = fidelity_to_phi_plus(rho);
    if (f >= b.lower - 4 * b.sigma_lower && f <= b.upper + 4 * b.sigma_upper) ++covered;
  }
  EXPECT_GE(covered, 990);
}

TEST(Uncertainty, BootstrapScalesAsInverseSqrtN) {
  const auto small = make_counts({470, 30, 20, 480, 460, 40, 35, 465});
  const auto large = make_counts({47000, 3000, 2000, 48000, 46000, 4000, 3500, 46500});
  const auto a = bound_uncertainties(small, {UncertaintyOptions::Method::kBootstrap, 1000, 1});
  const auto b = bound_uncertainties(large, {UncertaintyOptions::Method::kBootstrap, 1000, 1});
  EXPECT_NEAR(a.lower / b.lower, 10.0, 3.0);
  EXPECT_NEAR(a.upper / b.upper, 10.0, 3.0);
}

TEST(Uncertainty, GaussianAgreesWithBootstrap) {
  const auto c = make_counts({47000, 3000, 2000, 48000, 46000, 4000, 3500, 46500});
  const auto boot = bound_uncertainties(c, {UncertaintyOptions::Method::kBootstrap, 2000, 2});
  const auto gauss = bound_uncertainties(c, {UncertaintyOptions::Method::kGaussian, 0, 0});
  EXPECT_NEAR(boot.lower / gauss.lower, 1.0, 0.15);
  EXPECT_NEAR(boot.upper / gauss.upper, 1.0, 0.15);
}

TEST(Uncertainty, DegenerateCountsStayFinite) {
  const auto perfect = make_counts({5000, 0, 0, 5000, 5000, 0, 0, 5000});
  for (auto m : {UncertaintyOptions::Method::kBootstrap, UncertaintyOptions::Method::kGaussian}) {
    const auto s = bound_uncertainties(perfect, {m, 500, 3});
    EXPECT_TRUE(std::isfinite(s.lower));
    EXPECT_TRUE(std::isfinite(s.upper));
  }
  const auto tiny = make_counts({1, 0, 0, 0, 0, 0, 0, 1});
  const auto s = bound_uncertainties(tiny, {UncertaintyOptions::Method::kBootstrap, 500, 4});
  EXPECT_TRUE(std::isfinite(s.lower));
  EXPECT_TRUE(std::isfinite(s.upper));
}

TEST(Uncertainty, PerfectAtHighStatistics) {
  const auto c = make_counts({500000, 0, 0, 500000, 500000, 0, 0, 500000});
  const auto s = bound_uncertainties(c, {UncertaintyOptions::Method::kBootstrap, 1000, 5});
  EXPECT_LT(s.lower, 0.002);
}

TEST(Uncertainty, SeededBootstrapIsDeterministic) {
  const auto c = make_counts({470, 30, 20, 480, 460, 40, 35, 465});
  const auto a = bound_uncertainties(c, {UncertaintyOptions::Method::kBootstrap, 300, 9});
  const auto b = bound_uncertainties(c, {UncertaintyOptions::Method::kBootstrap, 300, 9});
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
  EXPECT_THROW(bound_uncertainties(c, {UncertaintyOptions::Method::kBootstrap, 1, 9}), std::invalid_argument);
}

TEST(Bounds, JsonShape) {
  const auto b = bounds_with_uncertainties(make_counts({470, 30, 20, 480, 460, 40, 35, 465}));
  const auto j = to_json(b);
  for (const char* k : {"lower", "upper", "sigma_lower", "sigma_upper", "expressions", "crossed"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["expressions"].size(), 8u);
  EXPECT_DOUBLE_EQ(j["expressions"]["L2"].get<double>(), b.expression("L2"));
}
