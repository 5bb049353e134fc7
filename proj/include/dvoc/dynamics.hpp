#pragma once

// Per-inverter dVOC (Andronov-Hopf) vector field with the contraction-based
// current feedback:
//
//   dx/dt = chi(x) x + omega0 J x - kappa (beta x - v_o),
//   chi(x) = xi (2 X_nom^2 - |x|^2).
//
// The state x is per-unit; beta converts it to volts at the network boundary.

#include <cmath>
#include <numbers>
#include <string>

#include "dvoc/errors.hpp"
#include "dvoc/phasor.hpp"

namespace dvoc {

/// Peak phase voltage of a 690 V (line-to-line RMS) machine: 690 * sqrt(2) / sqrt(3).
inline constexpr double kBeta690 = 690.0 * std::numbers::sqrt2 / std::numbers::sqrt3;
inline constexpr double kOmega50Hz = 2.0 * std::numbers::pi * 50.0;

struct InverterParams {
  double xi = 10.0;         ///< convergence gain, 1/(pu^2 s)
  double x_nom_sq2 = 1.0;   ///< 2 X_nom^2, pu^2
  double omega0 = kOmega50Hz;
  double kappa = 1.0;       ///< feedback gain; kappa*beta is a rate in 1/s
  double beta = kBeta690;   ///< V per pu
  double r_f = 0.0;         ///< filter/line resistance, ohm
  double L_f = 0.0;         ///< filter/line inductance, H
  double r_v = 0.0;         ///< virtual resistance, ohm
  double X_v = 0.0;         ///< virtual reactance, ohm

  double kappa_beta() const noexcept { return kappa * beta; }

  ComplexValue branch_impedance(double omega) const noexcept {
    return branch_impedance_at(r_f, L_f, r_v, X_v, omega);
  }

  friend bool operator==(const InverterParams&, const InverterParams&) = default;
};

/// Throws ParseError naming the first field that violates the parameter invariants.
inline void validate(const InverterParams& p) {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ParseError(key, what);
  };
  require(std::isfinite(p.xi) && p.xi > 0.0, "xi", "must be > 0");
  require(std::isfinite(p.x_nom_sq2) && p.x_nom_sq2 > 0.0, "x_nom_sq2", "must be > 0");
  require(std::isfinite(p.omega0) && p.omega0 > 0.0, "omega0", "must be > 0");
  require(std::isfinite(p.kappa) && p.kappa >= 0.0, "kappa", "must be >= 0");
  require(std::isfinite(p.beta) && p.beta > 0.0, "beta", "must be > 0");
  require(std::isfinite(p.r_f) && p.r_f >= 0.0, "r_f", "must be >= 0");
  require(std::isfinite(p.L_f) && p.L_f >= 0.0, "L_f", "must be >= 0");
  require(std::isfinite(p.r_v), "r_v", "must be finite");
  require(std::isfinite(p.X_v), "X_v", "must be finite");
  const ComplexValue z = p.branch_impedance(p.omega0);
  require(z.real() > 0.0 || z.imag() != 0.0, "r_v",
          "branch impedance (r_f + r_v) + j(omega0 L_f + X_v) must be nonzero");
}

constexpr double chi(const Phasor& x, const InverterParams& p) noexcept {
  return p.xi * (p.x_nom_sq2 - norm_sq(x));
}

/// Uncontrolled oscillator: chi x + omega0 J x.
constexpr Phasor open_loop_deriv(const Phasor& x, const InverterParams& p) noexcept {
  const double c = chi(x, p);
  return {c * x.alpha - p.omega0 * x.beta, c * x.beta + p.omega0 * x.alpha};
}

/// Closed loop with PCC voltage v_o in volts.
constexpr Phasor closed_loop_deriv(const Phasor& x, const Phasor& v_o,
                                   const InverterParams& p) noexcept {
  return open_loop_deriv(x, p) - p.kappa * (p.beta * x - v_o);
}

/// The contracting local map h(x) = (chi I + omega0 J - kappa beta I) x,
/// i.e. the closed loop with the common input kappa v_o removed.
constexpr Phasor local_map(const Phasor& x, const InverterParams& p) noexcept {
  return closed_loop_deriv(x, Phasor{}, p);
}

/// Analytic Jacobian of local_map: (chi - kappa beta) I + omega0 J - 2 xi x x^T.
constexpr Mat2 jacobian_h(const Phasor& x, const InverterParams& p) noexcept {
  const double d = chi(x, p) - p.kappa * p.beta;
  const double s = 2.0 * p.xi;
  Mat2 j;
  j(0, 0) = d - s * x.alpha * x.alpha;
  j(0, 1) = -p.omega0 - s * x.alpha * x.beta;
  j(1, 0) = p.omega0 - s * x.alpha * x.beta;
  j(1, 1) = d - s * x.beta * x.beta;
  return j;
}

/// Largest eigenvalue of the symmetric part of jacobian_h. Never exceeds
/// xi * 2X_nom^2 - kappa beta.
inline double sym_lambda_max(const Phasor& x, const InverterParams& p) noexcept {
  const Mat2 s = jacobian_h(x, p).symmetric_part();
  return sym2_lambda_max(s(0, 0), s(0, 1), s(1, 1));
}

} // namespace dvoc
