#pragma once

// Test-only reference implementations. Written against plain std::complex
// arrays and textbook formulas so that they share no code with the library.

#include <array>
#include <cmath>
#include <complex>

namespace oracle {

using C = std::complex<double>;
using Ket2 = std::array<C, 2>;
using Ket4 = std::array<C, 4>;
using Mat2 = std::array<std::array<C, 2>, 2>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat4 = std::array<std::array<C, 4>, 4>;

inline constexpr double kPi = 3.14159265358979323846;

/// Jones vector of the pure state with Stokes direction (s1, s2, s3), where
/// s1 = H/V, s2 = D/A, s3 = R/L and |R> = (|H> + i|V>)/sqrt2.
inline Ket2 jones(double s1, double s2, double s3) {
  const double theta = std::acos(std::max(-1.0, std::min(1.0, s1)));
  const double phi = std::atan2(s3, s2);
  return {C(std::cos(theta / 2), 0), std::polar(std::sin(theta / 2), phi)};
}

inline Ket4 kron(const Ket2& a, const Ket2& b) { return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]}; }

inline double expectation(const Mat4& rho, const Ket4& k) {
  C acc = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc += std::conj(k[i]) * rho[i][j] * k[j];
  return acc.real();
}

inline Mat4 pure(const Ket4& k) {
  Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = k[i] * std::conj(k[j]);
  return m;
}

inline Ket4 phi_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return {C(r), C(0), C(0), C(r)};
}

inline double bell_fidelity(const Mat4& rho) { return expectation(rho, phi_plus()); }

inline Mat4 werner(double a) {
  Mat4 m = pure(phi_plus());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = a * m[i][j] + (i == j ? C((1 - a) / 4) : C(0));
  return m;
}

/// Rodrigues' formula.
inline Mat3 rodrigues(std::array<double, 3> n, double angle) {
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  for (auto& x : n) x /= len;
  const double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
  return {{{t * n[0] * n[0] + c, t * n[0] * n[1] - s * n[2], t * n[0] * n[2] + s * n[1]},
           {t * n[0] * n[1] + s * n[2], t * n[1] * n[1] + c, t * n[1] * n[2] - s * n[0]},
           {t * n[0] * n[2] - s * n[1], t * n[1] * n[2] + s * n[0], t * n[2] * n[2] + c}}};
}

/// exp(-i angle/2 n.tau) with tau = (sigma_z, sigma_x, sigma_y).
inline Mat2 su2(std::array<double, 3> n, double angle) {
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  for (auto& x : n) x /= len;
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  const C i(0, 1);
  // n.tau = [[n1, n2 - i n3], [n2 + i n3, -n1]]
  return {{{C(c) - i * s * n[0], -i * s * C(n[1], -n[2])}, {-i * s * C(n[1], n[2]), C(c) + i * s * n[0]}}};
}

/// (I (x) U) rho (I (x) U)^dagger.
inline Mat4 one_sided(const Mat4& rho, const Mat2& u) {
  Mat4 big{};
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) big[2 * a + i][2 * a + j] = u[i][j];
  Mat4 tmp{}, out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) tmp[i][j] += big[i][k] * rho[k][j];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) out[i][j] += tmp[i][k] * std::conj(big[j][k]);
  return out;
}

/// Stokes vector of U|psi> for the pure state with Stokes vector s.
inline std::array<double, 3> rotate_by_su2(const Mat2& u, const std::array<double, 3>& s) {
  const Ket2 k = jones(s[0], s[1], s[2]);
  const Ket2 o = {u[0][0] * k[0] + u[0][1] * k[1], u[1][0] * k[0] + u[1][1] * k[1]};
  const double s1 = std::norm(o[0]) - std::norm(o[1]);
  const double s2 = 2 * (std::conj(o[0]) * o[1]).real();
  const double s3 = 2 * (std::conj(o[0]) * o[1]).imag();
  return {s1, s2, s3};
}

}  // namespace oracle
