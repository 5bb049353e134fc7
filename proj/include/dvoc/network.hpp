#pragma once

// Algebraic star network: n inverter branches (internal EMF behind a series
// impedance) meet at the point of common coupling (PCC), which feeds a
// downstream impedance z_net.
//
//   Y_sum = sum_m Y_m + Y_net
//   V     = sum_m Y_m E_m / Y_sum
//   I_i   = Y_i (E_i - V)
//
// Instantaneous alpha-beta signals are multiplied by admittances evaluated at
// omega_eval (quasi-static phasor model).

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dvoc/dynamics.hpp"
#include "dvoc/errors.hpp"
#include "dvoc/phasor.hpp"

namespace dvoc {

/// Series impedance added to a branch for t < t_remove (start-up current limiting).
struct ExtraImpedance {
  ComplexValue z;
  double t_remove = 0.0;

  bool active(double t) const noexcept {
    // Events are scheduled on step boundaries that are computed as k*dt; the
    // relative guard keeps t = 0.4000000000000001 from counting as "before 0.4".
    return t < t_remove - 1e-12 * std::max(1.0, std::abs(t_remove));
  }

  friend bool operator==(const ExtraImpedance&, const ExtraImpedance&) = default;
};

struct BranchImpedance {
  double r_f = 0.0;
  double L_f = 0.0;
  double r_v = 0.0;
  double X_v = 0.0;
  std::optional<ExtraImpedance> extra;

  ComplexValue at(double omega, double t) const noexcept {
    ComplexValue z = branch_impedance_at(r_f, L_f, r_v, X_v, omega);
    if (extra && extra->active(t)) z += extra->z;
    return z;
  }

  friend bool operator==(const BranchImpedance&, const BranchImpedance&) = default;
};

struct NetworkConfig {
  std::vector<BranchImpedance> branches;
  ComplexValue z_net{1.0, 0.0};
  double omega_eval = kOmega50Hz;

  std::size_t size() const noexcept { return branches.size(); }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Checks the network invariants; ParseError names the offending key.
inline void validate(const NetworkConfig& cfg) {
  if (cfg.branches.empty()) throw ParseError("network.branches", "at least one branch required");
  if (!(std::isfinite(cfg.omega_eval) && cfg.omega_eval > 0.0))
    throw ParseError("network.omega_eval", "must be > 0");
  if (!(std::abs(cfg.z_net) > 0.0) || !std::isfinite(std::abs(cfg.z_net)))
    throw ParseError("network.z_net", "must be nonzero and finite");
  for (std::size_t i = 0; i < cfg.branches.size(); ++i) {
    const auto& b = cfg.branches[i];
    const std::string key = "network.branches[" + std::to_string(i) + "]";
    if (std::abs(b.at(cfg.omega_eval, 0.0)) == 0.0 ||
        std::abs(b.at(cfg.omega_eval, INFINITY)) == 0.0)
      throw ParseError(key, "branch impedance is zero");
    if (b.extra && !(std::isfinite(b.extra->t_remove) && b.extra->t_remove >= 0.0))
      throw ParseError(key + ".t_z", "removal time must be >= 0");
  }
}

/// Admittances of every branch and of the downstream network at a fixed time.
struct AdmittanceSet {
  std::vector<ComplexValue> branch;
  ComplexValue net;
  ComplexValue branch_sum;
  ComplexValue total;

  /// Complex ratio sum(Y_m) / Y_sum relating the synchronized EMF to the PCC voltage.
  ComplexValue k_sh() const noexcept { return branch_sum / total; }
};

inline AdmittanceSet admittances_at(const NetworkConfig& cfg, double t) {
  AdmittanceSet y;
  y.branch.reserve(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    y.branch.push_back(admittance(cfg.branches[i].at(cfg.omega_eval, t),
                                  "branch " + std::to_string(i + 1)));
    y.branch_sum += y.branch.back();
  }
  y.net = admittance(cfg.z_net, "downstream network");
  y.total = y.branch_sum + y.net;
  return y;
}

inline ComplexValue total_admittance(const NetworkConfig& cfg, double t) {
  return admittances_at(cfg, t).total;
}

inline ComplexValue k_sh(const NetworkConfig& cfg, double t) { return admittances_at(cfg, t).k_sh(); }

/// PCC voltage for the given internal EMFs (volts, i.e. already beta-scaled).
inline Phasor pcc_voltage(std::span<const Phasor> emf, const AdmittanceSet& y) {
  if (emf.size() != y.branch.size())
    throw InputError("pcc_voltage: " + std::to_string(emf.size()) + " EMFs for " +
                     std::to_string(y.branch.size()) + " branches");
  ComplexValue acc{};
  for (std::size_t m = 0; m < emf.size(); ++m) acc += y.branch[m] * to_complex(emf[m]);
  return to_phasor(acc / y.total);
}

inline Phasor pcc_voltage(std::span<const Phasor> emf, const NetworkConfig& cfg, double t) {
  return pcc_voltage(emf, admittances_at(cfg, t));
}

inline std::vector<Phasor> branch_currents(std::span<const Phasor> emf, const Phasor& v_pcc,
                                           const AdmittanceSet& y) {
  if (emf.size() != y.branch.size())
    throw InputError("branch_currents: " + std::to_string(emf.size()) + " EMFs for " +
                     std::to_string(y.branch.size()) + " branches");
  std::vector<Phasor> out(emf.size());
  for (std::size_t i = 0; i < emf.size(); ++i)
    out[i] = complex_mul(emf[i] - v_pcc, y.branch[i]);
  return out;
}

inline std::vector<Phasor> branch_currents(std::span<const Phasor> emf, const Phasor& v_pcc,
                                           const NetworkConfig& cfg, double t) {
  return branch_currents(emf, v_pcc, admittances_at(cfg, t));
}

/// |sum_i I_i - Y_net V|, the current-conservation defect at the PCC.
inline double kcl_residual(std::span<const Phasor> currents, const Phasor& v_pcc,
                           const ComplexValue& y_net) {
  Phasor sum{};
  for (const auto& i : currents) sum += i;
  return norm(sum - complex_mul(v_pcc, y_net));
}

/// Marker for a non-positive amplitude radicand.
struct OscillatorDeath {
  double radicand;
};

/// Amplitude r* of the synchronized particular solution,
/// r*^2 = 2X_nom^2 - kappa beta (1 - K_sh) / xi.
inline std::variant<double, OscillatorDeath> particular_radius(double k_sh_real,
                                                               const InverterParams& p) {
  if (!(k_sh_real >= 0.0 && k_sh_real <= 1.0))
    throw InputError("particular_radius: K_sh must lie in [0, 1], got " + std::to_string(k_sh_real));
  const double radicand = p.x_nom_sq2 - p.kappa_beta() * (1.0 - k_sh_real) / p.xi;
  if (radicand > 0.0) return std::sqrt(radicand);
  return OscillatorDeath{radicand};
}

struct SynchronizedSteady {
  double r_star = 0.0;
  ComplexValue k_sh;
  double v_pcc_amplitude = 0.0;            ///< volts
  std::vector<double> current_amplitudes;  ///< amperes
};

/// Closed-form synchronized operating point. The imaginary part of K_sh only
/// shifts the oscillation frequency; the amplitude uses its real part.
inline SynchronizedSteady synchronized_steady(const InverterParams& p, const NetworkConfig& cfg,
                                              double t = INFINITY) {
  const AdmittanceSet y = admittances_at(cfg, t);
  SynchronizedSteady s;
  s.k_sh = y.k_sh();
  const auto r = particular_radius(std::clamp(s.k_sh.real(), 0.0, 1.0), p);
  if (const auto* death = std::get_if<OscillatorDeath>(&r)) throw OscillatorDeathError(death->radicand);
  s.r_star = std::get<double>(r);
  const double emf = p.beta * s.r_star;
  s.v_pcc_amplitude = std::abs(s.k_sh) * emf;
  s.current_amplitudes.reserve(cfg.size());
  for (const auto& yi : y.branch) s.current_amplitudes.push_back(std::abs(yi * y.net / y.total) * emf);
  return s;
}

} // namespace dvoc
