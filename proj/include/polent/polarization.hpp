#pragma once

// Polarization and two-qubit linear algebra.
//
// Conventions used throughout the library:
//   * Single-photon basis |H> = (1,0), |V> = (0,1); |D> = (|H>+|V>)/sqrt2,
//     |A> = (|H>-|V>)/sqrt2, |R> = (|H>+i|V>)/sqrt2, |L> = (|H>-i|V>)/sqrt2.
//   * Stokes axes: S1 = <sigma_z> (H = +S1), S2 = <sigma_x> (D = +S2),
//     S3 = <sigma_y> (R = +S3). The triple (sigma_z, sigma_x, sigma_y) is a
//     cyclic relabelling of the Pauli matrices, so it keeps the su(2)
//     commutation relations and a right-handed Stokes frame.
//   * A Poincare rotation by angle theta about unit axis n corresponds to
//     U = cos(theta/2) I - i sin(theta/2) n.tau, so |Tr U| = 2|cos(theta/2)|.
//     For a Bell pair with one photon sent through U,
//     <Phi+|(I (x) U)|Phi+> = Tr U / 2, giving fidelity cos^2(theta/2).
//   * Two-qubit ordering |HH>,|HV>,|VH>,|VV>; the second qubit is the one
//     that travels through the fiber.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace polent {

using Complex = std::complex<double>;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector2c = Eigen::Vector2cd;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
// Geometry (rotations, Stokes norms) and density-matrix (trace, Hermiticity)
// tolerances.
inline constexpr double kGeometryTol = 1e-9;
inline constexpr double kStateTol = 1e-12;

class StokesVector {
 public:
  StokesVector() = default;
  StokesVector(double s1, double s2, double s3);
  explicit StokesVector(const Vector3& v);

  static StokesVector H() { return {1, 0, 0}; }
  static StokesVector V() { return {-1, 0, 0}; }
  static StokesVector D() { return {0, 1, 0}; }
  static StokesVector A() { return {0, -1, 0}; }
  static StokesVector R() { return {0, 0, 1}; }
  static StokesVector L() { return {0, 0, -1}; }

  double s1() const { return v_.x(); }
  double s2() const { return v_.y(); }
  double s3() const { return v_.z(); }
  double dop() const { return v_.norm(); }
  const Vector3& vector() const { return v_; }

  /// Unit-length copy. Throws std::domain_error for an unpolarized vector.
  StokesVector normalized() const;

 private:
  Vector3 v_ = Vector3::Zero();
};

/// A proper rotation of Stokes space.
class PoincareRotation {
 public:
  PoincareRotation() : m_(Matrix3::Identity()) {}
  /// Validates orthonormality and det = +1 to kGeometryTol.
  explicit PoincareRotation(const Matrix3& m);

  static PoincareRotation identity() { return {}; }
  static PoincareRotation from_axis_angle(const Vector3& axis, double angle);
  /// Nearest rotation to an arbitrary 3x3 matrix (polar factor with det fix).
  static PoincareRotation project(const Matrix3& m);

  const Matrix3& matrix() const { return m_; }
  PoincareRotation transpose() const;
  PoincareRotation orthonormalized() const { return project(m_); }

  StokesVector operator*(const StokesVector& s) const { return StokesVector(Vector3(m_ * s.vector())); }
  PoincareRotation operator*(const PoincareRotation& o) const;

  /// Largest entry of |R^T R - I|.
  double orthogonality_error() const;

 private:
  struct Unchecked {};
  PoincareRotation(const Matrix3& m, Unchecked) : m_(m) {}

  Matrix3 m_;
};

/// Two-photon polarization density matrix.
class TwoQubitState {
 public:
  /// Validates Hermiticity and unit trace (kStateTol) and positivity
  /// (eigenvalues >= -kGeometryTol). Throws std::invalid_argument.
  explicit TwoQubitState(const Matrix4c& rho);

  const Matrix4c& matrix() const { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }

  /// Skips validation; for transforms that provably preserve a valid state.
  static TwoQubitState trusted(const Matrix4c& rho) { return TwoQubitState(rho, Unchecked{}); }

 private:
  struct Unchecked {};
  TwoQubitState(const Matrix4c& rho, Unchecked) : rho_(rho) {}

  Matrix4c rho_;
};

enum class MeasurementMode : std::uint8_t { H, V, D, A, R, L };

inline constexpr std::array<MeasurementMode, 6> kAllModes = {
    MeasurementMode::H, MeasurementMode::V, MeasurementMode::D,
    MeasurementMode::A, MeasurementMode::R, MeasurementMode::L};

char to_char(MeasurementMode m);
/// Throws std::invalid_argument for anything outside "HVDARL".
MeasurementMode parse_mode(char c);
Vector2c ket(MeasurementMode m);
Matrix2c projector(MeasurementMode m);
StokesVector stokes_of(MeasurementMode m);

TwoQubitState bell_phi_plus();
TwoQubitState maximally_mixed();
/// a |Phi+><Phi+| + (1-a)/4 I for a in [0,1].
TwoQubitState werner_state(double a);

/// <Phi+|rho|Phi+> = (rho11 + rho44 + rho14 + rho41) / 2.
double fidelity_to_phi_plus(const TwoQubitState& rho);
/// Same, for an unvalidated matrix; rejects non-Hermitian input.
double fidelity_to_phi_plus(const Matrix4c& rho);

Matrix2c su2_from_poincare(const PoincareRotation& r);
PoincareRotation poincare_from_su2(const Matrix2c& u);

/// (I (x) U) rho (I (x) U)^dagger with U = su2_from_poincare(r).
TwoQubitState apply_one_sided(const TwoQubitState& rho, const PoincareRotation& r);

/// Rotation angle in [0, pi]. Evaluated as atan2(|skew|, (Tr R - 1)/2), which
/// equals arccos((Tr R - 1)/2) but stays accurate near 0 and pi.
double rotation_angle(const PoincareRotation& r);
/// cos^2(theta/2): Bell-state fidelity after an uncorrected rotation by theta.
double fidelity_from_residual_rotation(double theta);

/// Tr[(P_a (x) P_b) rho].
double coincidence_probability(const TwoQubitState& rho, MeasurementMode a, MeasurementMode b);

Vector3 random_unit_vector(Rng& rng);
/// Haar-uniform rotation.
PoincareRotation random_rotation(Rng& rng);
/// Random density matrix G G^dagger / Tr from a complex Ginibre matrix.
TwoQubitState random_density_matrix(Rng& rng);

}  // namespace polent
