#pragma once

// Decentralized contraction certificates in the Euclidean metric.
//
// Every inverter obeys dx_k/dt = h(x_k) + kappa v_o(t) with the same input
// v_o, so all of them synchronize as soon as h is contracting. The symmetric
// part of dh/dx is bounded by (xi 2X_nom^2 - kappa beta) I, which gives the
// purely local margin c = kappa beta - xi 2X_nom^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "dvoc/dynamics.hpp"
#include "dvoc/errors.hpp"
#include "dvoc/phasor.hpp"

namespace dvoc {

inline constexpr double kLambdaTolerance = 1e-9;

/// Upper bound on the largest eigenvalue of the symmetric Jacobian part.
constexpr double lambda_bound(const InverterParams& p) noexcept {
  return p.xi * p.x_nom_sq2 - p.kappa * p.beta;
}

struct CertificateReport {
  double margin_c = 0.0;            ///< 1/s
  bool pass = false;
  double lambda_max_sampled = 0.0;  ///< 1/s; NaN until a sampled check is attached
  /// Error-ball radius per unit disturbance bound (1/c); nullopt when not contracting.
  std::optional<double> error_ball_radius;
  InverterParams params_echo;
};

inline CertificateReport certificate_margin(const InverterParams& p) {
  CertificateReport r;
  r.margin_c = -lambda_bound(p);
  r.pass = r.margin_c > 0.0;
  r.lambda_max_sampled = std::numeric_limits<double>::quiet_NaN();
  if (r.pass) r.error_ball_radius = 1.0 / r.margin_c;
  r.params_echo = p;
  return r;
}

struct LambdaCheck {
  double max_found = -std::numeric_limits<double>::infinity();
  double bound = 0.0;
  bool ok = false;
};

/// Samples states uniformly over the disc |x| <= radius (the origin is always
/// included as the first sample) and compares the worst symmetric-Jacobian
/// eigenvalue with the analytic bound.
inline LambdaCheck sampled_lambda_check(const InverterParams& p, double radius,
                                        std::size_t n_samples, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InputError("sampled_lambda_check: radius must be > 0");
  if (n_samples < 1) throw InputError("sampled_lambda_check: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LambdaCheck out;
  out.bound = lambda_bound(p);
  out.max_found = sym_lambda_max(Phasor{}, p);
  for (std::size_t k = 1; k < n_samples; ++k) {
    const double r = radius * std::sqrt(unit(rng));
    const double th = 2.0 * std::numbers::pi * unit(rng);
    out.max_found = std::max(out.max_found, sym_lambda_max({r * std::cos(th), r * std::sin(th)}, p));
  }
  out.ok = out.max_found <= out.bound + kLambdaTolerance;
  return out;
}

/// Certificate with the sampled eigenvalue attached.
inline CertificateReport certify(const InverterParams& p, double radius = 2.0,
                                 std::size_t n_samples = 1000, std::uint64_t seed = 0) {
  CertificateReport r = certificate_margin(p);
  r.lambda_max_sampled = sampled_lambda_check(p, radius, n_samples, seed).max_found;
  return r;
}

/// Steady separation bound d_bar / c (unit metric bounds, rate equal to c).
inline double error_ball_radius(double d_bar, double c) {
  if (!(c > 0.0)) throw NotContractingError("error ball undefined: contraction margin c <= 0");
  if (!(d_bar >= 0.0)) throw InputError("error_ball_radius: disturbance bound must be >= 0");
  return d_bar / c;
}

struct EnvelopeResult {
  bool ok = true;
  std::optional<double> first_violation_time;
  double worst_ratio = 0.0;  ///< max over samples of distance / envelope
};

/// Checks |x_i(t) - x_j(t)| <= e^{-c (t - t0)} |x_i(t0) - x_j(t0)| (1 + slack) + abs_floor.
/// `abs_floor` absorbs round-off once both trajectories coincide to machine precision.
inline EnvelopeResult envelope_check(const PhasorSeries& a, const PhasorSeries& b, double c,
                                     double slack = 0.05, double abs_floor = 0.0) {
  if (a.t.size() != a.x.size() || b.t.size() != b.x.size())
    throw InputError("envelope_check: series time and value lengths differ");
  if (a.t != b.t) throw InputError("envelope_check: trajectories are on different time grids");
  if (a.t.empty()) throw InputError("envelope_check: empty trajectories");
  if (!(c > 0.0)) throw NotContractingError("envelope_check: rate c must be > 0");
  if (a.t.size() > 2) {
    const double h = a.t[1] - a.t[0];
    for (std::size_t k = 2; k < a.t.size(); ++k)
      if (std::abs((a.t[k] - a.t[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
        throw InputError("envelope_check: time grid is not uniform");
  }
  EnvelopeResult r;
  const double d0 = distance(a.x[0], b.x[0]);
  const double t0 = a.t[0];
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    const double env = std::exp(-c * (a.t[k] - t0)) * d0;
    const double d = distance(a.x[k], b.x[k]);
    if (env > 0.0) r.worst_ratio = std::max(r.worst_ratio, d / env);
    if (d > env * (1.0 + slack) + abs_floor) {
      r.ok = false;
      r.first_violation_time = a.t[k];
      break;
    }
  }
  return r;
}

} // namespace dvoc
