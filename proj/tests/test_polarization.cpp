#include "oracles.hpp"
#include "polent/polarization.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace polent;

namespace {

oracle::Mat4 to_oracle(const TwoQubitState& s) {
  oracle::Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = s(i, j);
  return m;
}

std::array<double, 3> arr(const Vector3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

TEST(StokesVector, RejectsSuperUnitNorm) {
  EXPECT_THROW(StokesVector(1.1, 0, 0), std::invalid_argument);
  EXPECT_THROW(StokesVector(0.8, 0.8, 0), std::invalid_argument);
  EXPECT_NO_THROW(StokesVector(0.6, 0.8, 0));
  EXPECT_DOUBLE_EQ(StokesVector(0.3, 0.4, 0).dop(), 0.5);
  EXPECT_THROW(StokesVector(0, 0, 0).normalized(), std::domain_error);
}

TEST(StokesVector, ModesMatchJonesOracle) {
  for (auto m : kAllModes) {
    const auto s = stokes_of(m);
    const Vector2c k = ket(m);
    const auto o = oracle::jones(s.s1(), s.s2(), s.s3());
    // Equal up to a global phase.
    const Complex overlap = std::conj(o[0]) * k(0) + std::conj(o[1]) * k(1);
    EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12) << to_char(m);
  }
  EXPECT_EQ(parse_mode('D'), MeasurementMode::D);
  EXPECT_THROW(parse_mode('X'), std::invalid_argument);
}

TEST(PoincareRotation, RejectsNonRotations) {
  Matrix3 reflect = Matrix3::Identity();
  reflect(0, 0) = -1;
  EXPECT_THROW(PoincareRotation{reflect}, std::invalid_argument);
  EXPECT_THROW(PoincareRotation{Matrix3(2.0 * Matrix3::Identity())}, std::invalid_argument);
  EXPECT_NO_THROW(PoincareRotation{Matrix3(Eigen::Vector3d(1, -1, -1).asDiagonal())});
}

TEST(PoincareRotation, AxisAngleMatchesRodrigues) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Vector3 n = random_unit_vector(rng);
    const double angle = std::uniform_real_distribution<double>(-4, 4)(rng);
    const auto r = PoincareRotation::from_axis_angle(n, angle).matrix();
    const auto o = oracle::rodrigues(arr(n), angle);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(r(i, j), o[i][j], 1e-12);
  }
}

TEST(PoincareRotation, ProjectRecoversNearbyRotation) {
  Rng rng(4);
  const auto r = random_rotation(rng);
  Matrix3 noisy = r.matrix();
  noisy(0, 1) += 1e-4;
  const auto p = PoincareRotation::project(noisy);
  EXPECT_LT(p.orthogonality_error(), 1e-12);
  EXPECT_LT(rotation_angle(p.transpose() * r), 1e-3);
  EXPECT_NEAR(p.matrix().determinant(), 1.0, 1e-12);
}

TEST(RotationAngle, Anchors) {
  EXPECT_DOUBLE_EQ(rotation_angle(PoincareRotation::identity()), 0.0);
  const PoincareRotation flip{Matrix3(Eigen::Vector3d(1, -1, -1).asDiagonal())};
  EXPECT_NEAR(rotation_angle(flip), kPi, 1e-15);
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const Vector3 n = random_unit_vector(rng);
    EXPECT_NEAR(rotation_angle(PoincareRotation::from_axis_angle(n, 0.3)), 0.3, 1e-12);
  }
}

TEST(RotationAngle, AccurateNearZeroAndPi) {
  const Vector3 n = Vector3(1, 2, 3).normalized();
  for (double a : {1e-9, 1e-7, 1e-4}) {
    EXPECT_NEAR(rotation_angle(PoincareRotation::from_axis_angle(n, a)), a, 1e-14);
    EXPECT_NEAR(rotation_angle(PoincareRotation::from_axis_angle(n, kPi - a)), kPi - a, 1e-12);
  }
}

TEST(Su2, MatchesOracleUpToSign) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const Vector3 n = random_unit_vector(rng);
    const double a = std::uniform_real_distribution<double>(0, kPi)(rng);
    const Matrix2c u = su2_from_poincare(PoincareRotation::from_axis_angle(n, a));
    const auto o = oracle::su2(arr(n), a);
    Complex overlap = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) overlap += std::conj(o[i][j]) * u(i, j);
    EXPECT_NEAR(std::abs(overlap) / 2.0, 1.0, 1e-12);
  }
}

TEST(Su2, OracleUnitaryRotatesStokesLikeRodrigues) {
  // Pins the sign convention shared by the oracle and the library.
  const std::array<double, 3> n = {0.3, -0.5, 0.8};
  const auto u = oracle::su2(n, 1.1);
  const auto r = oracle::rodrigues(n, 1.1);
  for (const std::array<double, 3> s : {std::array<double, 3>{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) {
    const auto got = oracle::rotate_by_su2(u, s);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], r[i][0] * s[0] + r[i][1] * s[1] + r[i][2] * s[2], 1e-12);
  }
}

TEST(Su2, RoundTrip) {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto r = random_rotation(rng);
    const auto back = poincare_from_su2(su2_from_poincare(r));
    EXPECT_LT((back.matrix() - r.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_NEAR(std::abs(su2_from_poincare(PoincareRotation::identity()).trace()), 2.0, 1e-15);
  const auto half = su2_from_poincare(PoincareRotation::from_axis_angle(Vector3::UnitZ(), kPi));
  EXPECT_NEAR(std::abs(half.trace()), 0.0, 1e-15);
}

TEST(TwoQubitState, Validation) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = 1.0;
  EXPECT_NO_THROW(TwoQubitState{m});
  m(0, 0) = 0.9;
  EXPECT_THROW(TwoQubitState{m}, std::invalid_argument);  // trace
  m = Matrix4c::Identity() / 4.0;
  m(0, 1) = Complex(0, 0.1);
  EXPECT_THROW(TwoQubitState{m}, std::invalid_argument);  // not Hermitian
  m = Matrix4c::Zero();
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(TwoQubitState{m}, std::invalid_argument);  // negative eigenvalue
}

TEST(BellState, Definition) {
  const auto& rho = bell_phi_plus().matrix();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const bool corner = (i == 0 || i == 3) && (j == 0 || j == 3);
      EXPECT_NEAR(std::abs(rho(i, j) - Complex(corner ? 0.5 : 0.0)), 0.0, 1e-15);
    }
  }
  EXPECT_NEAR(fidelity_to_phi_plus(bell_phi_plus()), 1.0, 1e-15);
  EXPECT_NEAR(fidelity_to_phi_plus(maximally_mixed()), 0.25, 1e-15);
  Matrix4c psi = Matrix4c::Zero();
  psi(1, 1) = psi(2, 2) = psi(1, 2) = psi(2, 1) = 0.5;
  EXPECT_NEAR(fidelity_to_phi_plus(TwoQubitState(psi)), 0.0, 1e-15);
}

TEST(BellState, FidelityRejectsNonHermitian) {
  Matrix4c m = Matrix4c::Identity() / 4.0;
  m(0, 3) = Complex(0.1, 0);
  EXPECT_THROW(fidelity_to_phi_plus(m), std::invalid_argument);
}

TEST(Werner, FidelityFormula) {
  for (int k = 0; k <= 100; ++k) {
    const double a = k / 100.0;
    const double expected = (1.0 + 3.0 * a) / 4.0;
    EXPECT_NEAR(fidelity_to_phi_plus(werner_state(a)), expected, 1e-12);
    EXPECT_NEAR(oracle::bell_fidelity(oracle::werner(a)), expected, 1e-12);
  }
  EXPECT_NEAR(fidelity_to_phi_plus(werner_state(0.9)), 0.925, 1e-12);
  EXPECT_NEAR(fidelity_to_phi_plus(werner_state(14.0 / 15.0)), 0.95, 1e-12);
  EXPECT_LT((werner_state(1.0).matrix() - bell_phi_plus().matrix()).norm(), 1e-15);
  EXPECT_LT((werner_state(0.0).matrix() - maximally_mixed().matrix()).norm(), 1e-15);
  EXPECT_THROW(werner_state(1.2), std::invalid_argument);
  EXPECT_THROW(werner_state(-0.1), std::invalid_argument);
}

TEST(CoincidenceProbability, Anchors) {
  using M = MeasurementMode;
  const auto phi = bell_phi_plus();
  EXPECT_NEAR(coincidence_probability(phi, M::H, M::H), 0.5, 1e-15);
  EXPECT_NEAR(coincidence_probability(phi, M::H, M::V), 0.0, 1e-15);
  EXPECT_NEAR(coincidence_probability(phi, M::D, M::D), 0.5, 1e-15);
  EXPECT_NEAR(coincidence_probability(phi, M::D, M::A), 0.0, 1e-15);
  EXPECT_NEAR(coincidence_probability(phi, M::R, M::L), 0.5, 1e-15);
  EXPECT_NEAR(coincidence_probability(werner_state(0.9), M::H, M::V), 0.025, 1e-15);
}

TEST(CoincidenceProbability, MatchesOracleOnRandomStates) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto rho = random_density_matrix(rng);
    const auto o = to_oracle(rho);
    for (auto a : kAllModes) {
      for (auto b : kAllModes) {
        const auto sa = stokes_of(a), sb = stokes_of(b);
        const auto k = oracle::kron(oracle::jones(sa.s1(), sa.s2(), sa.s3()), oracle::jones(sb.s1(), sb.s2(), sb.s3()));
        EXPECT_NEAR(coincidence_probability(rho, a, b), oracle::expectation(o, k), 1e-12);
      }
    }
  }
}

TEST(OneSided, BellFidelityIsCosSquaredHalfAngle) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const Vector3 n = random_unit_vector(rng);
    const double theta = std::uniform_real_distribution<double>(0, kPi)(rng);
    const auto r = PoincareRotation::from_axis_angle(n, theta);
    const double lib = fidelity_to_phi_plus(apply_one_sided(bell_phi_plus(), r));
    const double orc = oracle::bell_fidelity(oracle::one_sided(oracle::pure(oracle::phi_plus()), oracle::su2(arr(n), theta)));
    EXPECT_NEAR(lib, orc, 1e-10);
    EXPECT_NEAR(fidelity_from_residual_rotation(theta), orc, 1e-10);
  }
}

TEST(OneSided, Anchors) {
  EXPECT_LT((apply_one_sided(bell_phi_plus(), PoincareRotation::identity()).matrix() - bell_phi_plus().matrix()).norm(),
            1e-15);
  const auto flip = PoincareRotation::from_axis_angle(Vector3::UnitZ(), kPi);
  EXPECT_NEAR(fidelity_to_phi_plus(apply_one_sided(bell_phi_plus(), flip)), 0.0, 1e-15);
  Rng rng(10);
  const auto mixed = apply_one_sided(maximally_mixed(), random_rotation(rng));
  EXPECT_LT((mixed.matrix() - maximally_mixed().matrix()).norm(), 1e-15);
}

TEST(ResidualRotation, Anchors) {
  EXPECT_DOUBLE_EQ(fidelity_from_residual_rotation(0.0), 1.0);
  EXPECT_NEAR(fidelity_from_residual_rotation(kPi), 0.0, 1e-15);
  EXPECT_NEAR(fidelity_from_residual_rotation(kPi / 2), 0.5, 1e-15);
  EXPECT_THROW(fidelity_from_residual_rotation(-0.1), std::invalid_argument);
  EXPECT_THROW(fidelity_from_residual_rotation(4.0), std::invalid_argument);
}

TEST(RandomStates, AreValid) {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto r = random_rotation(rng);
    EXPECT_LT(r.orthogonality_error(), 1e-12);
    EXPECT_NEAR(r.matrix().determinant(), 1.0, 1e-12);
    const auto rho = random_density_matrix(rng);
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    using M = MeasurementMode;
    for (auto [a, b] : {std::pair{M::H, M::V}, std::pair{M::D, M::A}, std::pair{M::R, M::L}}) {
      const double total = coincidence_probability(rho, a, a) + coincidence_probability(rho, a, b) +
                           coincidence_probability(rho, b, a) + coincidence_probability(rho, b, b);
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}
