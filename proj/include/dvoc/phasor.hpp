#pragma once

// Stationary alpha-beta frame arithmetic. A Phasor is the 2-vector (alpha, beta)
// identified with the complex number alpha + j*beta; impedances and admittances
// are plain std::complex<double> values.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "dvoc/errors.hpp"

namespace dvoc {

using ComplexValue = std::complex<double>;

inline constexpr double kSqrt3 = 1.7320508075688772935;

struct Phasor {
  double alpha = 0.0;
  double beta = 0.0;

  constexpr Phasor& operator+=(const Phasor& o) noexcept {
    alpha += o.alpha;
    beta += o.beta;
    return *this;
  }
  constexpr Phasor& operator-=(const Phasor& o) noexcept {
    alpha -= o.alpha;
    beta -= o.beta;
    return *this;
  }
  constexpr Phasor& operator*=(double s) noexcept {
    alpha *= s;
    beta *= s;
    return *this;
  }

  friend constexpr Phasor operator+(Phasor a, const Phasor& b) noexcept { return a += b; }
  friend constexpr Phasor operator-(Phasor a, const Phasor& b) noexcept { return a -= b; }
  friend constexpr Phasor operator-(const Phasor& a) noexcept { return {-a.alpha, -a.beta}; }
  friend constexpr Phasor operator*(double s, Phasor a) noexcept { return a *= s; }
  friend constexpr Phasor operator*(Phasor a, double s) noexcept { return a *= s; }
  friend constexpr bool operator==(const Phasor&, const Phasor&) = default;
};

inline double norm(const Phasor& p) noexcept { return std::hypot(p.alpha, p.beta); }
constexpr double norm_sq(const Phasor& p) noexcept { return p.alpha * p.alpha + p.beta * p.beta; }
inline double distance(const Phasor& a, const Phasor& b) noexcept { return norm(a - b); }

constexpr ComplexValue to_complex(const Phasor& p) noexcept { return {p.alpha, p.beta}; }
constexpr Phasor to_phasor(const ComplexValue& z) noexcept { return {z.real(), z.imag()}; }

/// Rotation-scaling of p by z, i.e. the complex product (alpha + j beta) * z.
constexpr Phasor complex_mul(const Phasor& p, const ComplexValue& z) noexcept {
  return {p.alpha * z.real() - p.beta * z.imag(), p.alpha * z.imag() + p.beta * z.real()};
}

/// 90 degree rotation J*p with J = [[0,-1],[1,0]].
constexpr Phasor rotate90(const Phasor& p) noexcept { return {-p.beta, p.alpha}; }

/// Counter-clockwise rotation by theta radians.
inline Phasor rotate(const Phasor& p, double theta) noexcept {
  return complex_mul(p, std::polar(1.0, theta));
}

/// Complex reciprocal 1/z. `what` names the branch in the error message.
inline ComplexValue admittance(const ComplexValue& z, const std::string& what = "impedance") {
  const double n2 = std::norm(z);
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw DomainError(what + " has zero (or non-finite) magnitude; admittance undefined");
  }
  return std::conj(z) / n2;
}

/// Quasi-static series impedance (r_f + r_v) + j(omega*L_f + X_v).
constexpr ComplexValue branch_impedance_at(double r_f, double L_f, double r_v, double X_v,
                                           double omega) noexcept {
  return {r_f + r_v, omega * L_f + X_v};
}

struct ThreePhase {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Amplitude-invariant inverse Clarke transform (alpha equals the phase-a amplitude).
constexpr ThreePhase inv_clarke(const Phasor& p) noexcept {
  const double h = 0.5 * kSqrt3 * p.beta;
  return {p.alpha, -0.5 * p.alpha + h, -0.5 * p.alpha - h};
}

/// Dense 2x2 real matrix, row-major.
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{};

  constexpr double operator()(int r, int c) const noexcept { return m[r][c]; }
  constexpr double& operator()(int r, int c) noexcept { return m[r][c]; }

  constexpr Mat2 transposed() const noexcept {
    return {{{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}};
  }
  constexpr Mat2 symmetric_part() const noexcept {
    const double off = 0.5 * (m[0][1] + m[1][0]);
    return {{{{m[0][0], off}, {off, m[1][1]}}}};
  }
  constexpr Mat2 skew_part() const noexcept {
    const double off = 0.5 * (m[0][1] - m[1][0]);
    return {{{{0.0, off}, {-off, 0.0}}}};
  }
  constexpr Phasor operator*(const Phasor& p) const noexcept {
    return {m[0][0] * p.alpha + m[0][1] * p.beta, m[1][0] * p.alpha + m[1][1] * p.beta};
  }
};

/// Sampled signal on a time grid.
struct PhasorSeries {
  std::vector<double> t;
  std::vector<Phasor> x;
};

/// Largest eigenvalue of a symmetric 2x2 matrix [[a, b], [b, d]].
inline double sym2_lambda_max(double a, double b, double d) noexcept {
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  return mean + std::hypot(half_diff, b);
}

} // namespace dvoc
