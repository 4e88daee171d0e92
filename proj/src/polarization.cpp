#include "polent/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polent {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};

// Pauli matrices in Stokes order: tau_1 = sigma_z, tau_2 = sigma_x, tau_3 = sigma_y.
const std::array<Matrix2c, 3>& stokes_paulis() {
  static const std::array<Matrix2c, 3> taus = [] {
    std::array<Matrix2c, 3> t;
    t[0] << 1, 0, 0, -1;
    t[1] << 0, 1, 1, 0;
    t[2] << 0, -kI, kI, 0;
    return t;
  }();
  return taus;
}

Matrix2c projector_from_ket(const Vector2c& k) { return k * k.adjoint(); }

}  // namespace

StokesVector::StokesVector(double s1, double s2, double s3) : StokesVector(Vector3(s1, s2, s3)) {}

StokesVector::StokesVector(const Vector3& v) : v_(v) {
  if (!v.allFinite()) throw std::invalid_argument("Stokes vector has non-finite components");
  if (v.squaredNorm() > 1.0 + kGeometryTol) {
    throw std::invalid_argument("Stokes vector outside the Poincare sphere (|s|^2 = " +
                                std::to_string(v.squaredNorm()) + ")");
  }
}

StokesVector StokesVector::normalized() const {
  const double n = v_.norm();
  if (n <= 0.0) throw std::domain_error("cannot normalize an unpolarized Stokes vector");
  return StokesVector(Vector3(v_ / n));
}

PoincareRotation::PoincareRotation(const Matrix3& m) : m_(m) {
  if (!m.allFinite()) throw std::invalid_argument("rotation matrix has non-finite entries");
  if (orthogonality_error() > kGeometryTol) {
    throw std::invalid_argument("matrix is not orthonormal (error " + std::to_string(orthogonality_error()) + ")");
  }
  if (std::abs(m.determinant() - 1.0) > kGeometryTol) {
    throw std::invalid_argument("matrix is not a proper rotation (det " + std::to_string(m.determinant()) + ")");
  }
}

PoincareRotation PoincareRotation::from_axis_angle(const Vector3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::invalid_argument("rotation axis must be non-zero");
  return PoincareRotation(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix(), Unchecked{});
}

PoincareRotation PoincareRotation::project(const Matrix3& m) {
  Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3 fix = Matrix3::Identity();
  fix(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return PoincareRotation(Matrix3(svd.matrixU() * fix * svd.matrixV().transpose()), Unchecked{});
}

PoincareRotation PoincareRotation::transpose() const { return PoincareRotation(Matrix3(m_.transpose()), Unchecked{}); }

PoincareRotation PoincareRotation::operator*(const PoincareRotation& o) const {
  return PoincareRotation(Matrix3(m_ * o.m_), Unchecked{});
}

double PoincareRotation::orthogonality_error() const {
  return (m_.transpose() * m_ - Matrix3::Identity()).cwiseAbs().maxCoeff();
}

TwoQubitState::TwoQubitState(const Matrix4c& rho) : rho_(rho) {
  if (!rho.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kStateTol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kGeometryTol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
}

char to_char(MeasurementMode m) {
  static constexpr std::string_view kNames = "HVDARL";
  return kNames[static_cast<std::size_t>(m)];
}

MeasurementMode parse_mode(char c) {
  switch (c) {
    case 'H': return MeasurementMode::H;
    case 'V': return MeasurementMode::V;
    case 'D': return MeasurementMode::D;
    case 'A': return MeasurementMode::A;
    case 'R': return MeasurementMode::R;
    case 'L': return MeasurementMode::L;
  }
  throw std::invalid_argument(std::string("unknown polarization mode '") + c + "'");
}

Vector2c ket(MeasurementMode m) {
  switch (m) {
    case MeasurementMode::H: return Vector2c(1, 0);
    case MeasurementMode::V: return Vector2c(0, 1);
    case MeasurementMode::D: return Vector2c(kInvSqrt2, kInvSqrt2);
    case MeasurementMode::A: return Vector2c(kInvSqrt2, -kInvSqrt2);
    case MeasurementMode::R: return Vector2c(kInvSqrt2, kInvSqrt2 * kI);
    case MeasurementMode::L: return Vector2c(kInvSqrt2, -kInvSqrt2 * kI);
  }
  throw std::logic_error("unreachable");
}

Matrix2c projector(MeasurementMode m) { return projector_from_ket(ket(m)); }

StokesVector stokes_of(MeasurementMode m) {
  switch (m) {
    case MeasurementMode::H: return StokesVector::H();
    case MeasurementMode::V: return StokesVector::V();
    case MeasurementMode::D: return StokesVector::D();
    case MeasurementMode::A: return StokesVector::A();
    case MeasurementMode::R: return StokesVector::R();
    case MeasurementMode::L: return StokesVector::L();
  }
  throw std::logic_error("unreachable");
}

TwoQubitState bell_phi_plus() {
  Matrix4c rho = Matrix4c::Zero();
  rho(0, 0) = rho(3, 3) = rho(0, 3) = rho(3, 0) = 0.5;
  return TwoQubitState::trusted(rho);
}

TwoQubitState maximally_mixed() { return TwoQubitState::trusted(Matrix4c::Identity() / 4.0); }

TwoQubitState werner_state(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("Werner parameter must lie in [0, 1]");
  Matrix4c rho = a * bell_phi_plus().matrix() + (1.0 - a) / 4.0 * Matrix4c::Identity();
  return TwoQubitState::trusted(rho);
}

double fidelity_to_phi_plus(const TwoQubitState& rho) {
  const Matrix4c& m = rho.matrix();
  return 0.5 * (m(0, 0) + m(3, 3) + m(0, 3) + m(3, 0)).real();
}

double fidelity_to_phi_plus(const Matrix4c& rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTol) {
    throw std::invalid_argument("fidelity requires a Hermitian density matrix");
  }
  return 0.5 * (rho(0, 0) + rho(3, 3) + rho(0, 3) + rho(3, 0)).real();
}

Matrix2c su2_from_poincare(const PoincareRotation& r) {
  const Eigen::Quaterniond q(r.matrix());
  const auto& tau = stokes_paulis();
  return q.w() * Matrix2c::Identity() - kI * (q.x() * tau[0] + q.y() * tau[1] + q.z() * tau[2]);
}

PoincareRotation poincare_from_su2(const Matrix2c& u) {
  const auto& tau = stokes_paulis();
  Matrix3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m(i, j) = 0.5 * (tau[i] * u * tau[j] * u.adjoint()).trace().real();
    }
  }
  return PoincareRotation(m);
}

TwoQubitState apply_one_sided(const TwoQubitState& rho, const PoincareRotation& r) {
  Matrix4c op = Matrix4c::Zero();
  const Matrix2c u = su2_from_poincare(r);
  op.topLeftCorner<2, 2>() = u;
  op.bottomRightCorner<2, 2>() = u;
  return TwoQubitState::trusted(op * rho.matrix() * op.adjoint());
}

double rotation_angle(const PoincareRotation& r) {
  const Matrix3& m = r.matrix();
  const Vector3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::atan2(0.5 * skew.norm(), c);
}

double fidelity_from_residual_rotation(double theta) {
  if (!(theta >= -kGeometryTol && theta <= kPi + kGeometryTol)) {
    throw std::invalid_argument("residual rotation angle must lie in [0, pi]");
  }
  const double c = std::cos(theta / 2.0);
  return c * c;
}

double coincidence_probability(const TwoQubitState& rho, MeasurementMode a, MeasurementMode b) {
  Eigen::Vector4cd k;
  const Vector2c ka = ket(a);
  const Vector2c kb = ket(b);
  k << ka(0) * kb(0), ka(0) * kb(1), ka(1) * kb(0), ka(1) * kb(1);
  const double p = (k.adjoint() * rho.matrix() * k)(0, 0).real();
  return std::clamp(p, 0.0, 1.0);
}

Vector3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vector3 v(n(rng), n(rng), n(rng));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

PoincareRotation random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return PoincareRotation::project(q.toRotationMatrix());
}

TwoQubitState random_density_matrix(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix4c g;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) g(i, j) = Complex(n(rng), n(rng));
  }
  Matrix4c rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return TwoQubitState(rho);
}

}  // namespace polent
