#pragma once

// Fixed-step RK4 integration of N closed-loop inverters coupled through the
// algebraic star network. The network is solved by substitution at every
// stage (v_o is an explicit admittance-weighted average of the EMFs), and
// impedance events are aligned to step boundaries: the admittances in force
// during the step [t_k, t_k + dt) are those at t_k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dvoc/dynamics.hpp"
#include "dvoc/errors.hpp"
#include "dvoc/network.hpp"
#include "dvoc/phasor.hpp"

namespace dvoc {

inline constexpr double kDivergenceNorm = 100.0;
inline constexpr double kMaxStepPhase = 0.2;  ///< upper bound on dt * omega0

struct NormOverride {
  std::size_t index = 0;  ///< zero-based
  double norm = 0.0;
  friend bool operator==(const NormOverride&, const NormOverride&) = default;
};

struct InitPolicy {
  std::uint64_t seed = 0;
  double norm_bound = 1.0;
  std::vector<NormOverride> overrides;
  friend bool operator==(const InitPolicy&, const InitPolicy&) = default;
};

enum class Waveform { constant, rotating };

/// Additive term d(t) on one inverter's vector field. `constant` is a fixed
/// alpha-axis vector; `rotating` turns at that inverter's omega0.
struct Disturbance {
  std::size_t index = 0;
  double amplitude = 0.0;
  Waveform waveform = Waveform::rotating;

  Phasor at(double t, double omega0) const noexcept {
    if (waveform == Waveform::constant) return {amplitude, 0.0};
    return {amplitude * std::cos(omega0 * t), amplitude * std::sin(omega0 * t)};
  }
  friend bool operator==(const Disturbance&, const Disturbance&) = default;
};

struct Scenario {
  std::vector<InverterParams> params;  ///< one per inverter
  NetworkConfig network;               ///< branches mirror the params' impedance fields
  double t_end = 2.0;
  double dt = 1e-4;
  InitPolicy init;
  std::optional<Disturbance> disturbance;

  std::size_t size() const noexcept { return params.size(); }
  std::size_t steps() const noexcept { return static_cast<std::size_t>(std::llround(t_end / dt)); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Builds branches from the impedance fields of each inverter's parameters.
inline NetworkConfig make_network(std::span<const InverterParams> params, ComplexValue z_net,
                                  double omega_eval) {
  NetworkConfig cfg;
  cfg.z_net = z_net;
  cfg.omega_eval = omega_eval;
  cfg.branches.reserve(params.size());
  for (const auto& p : params) cfg.branches.push_back({p.r_f, p.L_f, p.r_v, p.X_v, std::nullopt});
  return cfg;
}

inline void validate(const Scenario& s) {
  if (s.params.empty()) throw ParseError("inverters", "at least one inverter required");
  for (std::size_t i = 0; i < s.size(); ++i) {
    try {
      validate(s.params[i]);
    } catch (const ParseError& e) {
      throw ParseError("inverters[" + std::to_string(i + 1) + "]." + e.key(), e.reason());
    }
  }
  validate(s.network);
  if (s.network.size() != s.size())
    throw ParseError("network.branches", "branch count differs from inverter count");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& b = s.network.branches[i];
    const auto& p = s.params[i];
    if (b.r_f != p.r_f || b.L_f != p.L_f || b.r_v != p.r_v || b.X_v != p.X_v)
      throw ParseError("network.branches[" + std::to_string(i + 1) + "]",
                       "impedance differs from inverters[" + std::to_string(i + 1) + "]");
  }
  if (!(std::isfinite(s.dt) && s.dt > 0.0)) throw ParseError("dt", "must be > 0");
  if (!(std::isfinite(s.t_end) && s.t_end >= s.dt)) throw ParseError("t_end", "must be >= dt");
  for (const auto& p : s.params)
    if (!(s.dt * p.omega0 < kMaxStepPhase))
      throw ParseError("dt", "dt * omega0 must be < 0.2 (resolution guard)");
  if (!(std::isfinite(s.init.norm_bound) && s.init.norm_bound >= 0.0))
    throw ParseError("init.norm_bound", "must be >= 0");
  for (const auto& o : s.init.overrides) {
    if (o.index >= s.size()) throw ParseError("init.overrides.index", "out of range");
    if (!(std::isfinite(o.norm) && o.norm >= 0.0)) throw ParseError("init.overrides.norm", "must be >= 0");
  }
  if (s.disturbance) {
    if (s.disturbance->index >= s.size()) throw ParseError("disturbance.index", "out of range");
    if (!std::isfinite(s.disturbance->amplitude))
      throw ParseError("disturbance.amplitude", "must be finite");
  }
}

struct PlantState {
  double t = 0.0;
  std::vector<Phasor> x;
};

/// Uniform angle and uniform norm in [0, norm_bound] per inverter; overrides
/// replace the norm but keep the drawn angle.
inline PlantState init_random(const Scenario& s) {
  std::mt19937_64 rng(s.init.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PlantState st;
  st.x.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double r = s.init.norm_bound * unit(rng);
    const double th = 2.0 * std::numbers::pi * unit(rng);
    st.x.push_back({r * std::cos(th), r * std::sin(th)});
  }
  for (const auto& o : s.init.overrides) {
    const double r = norm(st.x[o.index]);
    if (r > 0.0) {
      st.x[o.index] *= o.norm / r;
    } else {
      st.x[o.index] = {o.norm, 0.0};
    }
  }
  return st;
}

/// Per-step network quantities recorded alongside the state.
struct NetworkSample {
  Phasor v_o;
  std::vector<Phasor> currents;
};

namespace detail {

inline void emf_of(std::span<const Phasor> x, std::span<const InverterParams> params,
                   std::vector<Phasor>& out) {
  out.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = params[k].beta * x[k];
}

/// One evaluation of the coupled field with fixed admittances.
inline Phasor coupled_field(std::span<const Phasor> x, double t, const Scenario& s,
                            const AdmittanceSet& y, std::vector<Phasor>& emf,
                            std::span<Phasor> out) {
  emf_of(x, s.params, emf);
  const Phasor v_o = pcc_voltage(emf, y);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = closed_loop_deriv(x[k], v_o, s.params[k]);
  if (s.disturbance) {
    const auto& d = *s.disturbance;
    out[d.index] += d.at(t, s.params[d.index].omega0);
  }
  return v_o;
}

} // namespace detail

/// Time derivative of every inverter; v_o is computed once and shared by all.
inline std::vector<Phasor> deriv_coupled(const PlantState& st, const Scenario& s) {
  if (st.x.size() != s.size()) throw InputError("deriv_coupled: state size differs from scenario");
  const AdmittanceSet y = admittances_at(s.network, st.t);
  std::vector<Phasor> emf;
  std::vector<Phasor> out(st.x.size());
  detail::coupled_field(st.x, st.t, s, y, emf, out);
  return out;
}

inline NetworkSample network_sample(std::span<const Phasor> x, const Scenario& s, double t) {
  const AdmittanceSet y = admittances_at(s.network, t);
  std::vector<Phasor> emf;
  detail::emf_of(x, s.params, emf);
  NetworkSample ns;
  ns.v_o = pcc_voltage(emf, y);
  ns.currents = branch_currents(emf, ns.v_o, y);
  return ns;
}

/// Reusable RK4 stepper; owns its scratch buffers. Not shareable across
/// threads, but independent instances are.
class Rk4Stepper {
public:
  explicit Rk4Stepper(const Scenario& s) : s_(&s) {
    const std::size_t n = s.size();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(n);
  }

  /// Advances st by dt using the admittances in force at st.t. `step_index`
  /// sets the new time to (step_index + 1) * dt when given, avoiding drift.
  void step(PlantState& st, std::optional<std::size_t> step_index = std::nullopt) {
    const Scenario& s = *s_;
    const std::size_t n = s.size();
    if (st.x.size() != n) throw InputError("rk4_step: state size differs from scenario");
    const double h = s.dt;
    const double t = st.t;
    const AdmittanceSet y = admittances_at(s.network, t);

    detail::coupled_field(st.x, t, s, y, emf_, k1_);
    for (std::size_t k = 0; k < n; ++k) tmp_[k] = st.x[k] + 0.5 * h * k1_[k];
    detail::coupled_field(tmp_, t + 0.5 * h, s, y, emf_, k2_);
    for (std::size_t k = 0; k < n; ++k) tmp_[k] = st.x[k] + 0.5 * h * k2_[k];
    detail::coupled_field(tmp_, t + 0.5 * h, s, y, emf_, k3_);
    for (std::size_t k = 0; k < n; ++k) tmp_[k] = st.x[k] + h * k3_[k];
    detail::coupled_field(tmp_, t + h, s, y, emf_, k4_);

    const double w = h / 6.0;
    for (std::size_t k = 0; k < n; ++k)
      st.x[k] += w * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
    st.t = step_index ? static_cast<double>(*step_index + 1) * h : t + h;

    for (std::size_t k = 0; k < n; ++k) {
      const double r = norm(st.x[k]);
      if (!std::isfinite(r) || r > kDivergenceNorm) throw DivergenceError(st.t, k, r);
    }
  }

private:
  const Scenario* s_;
  std::vector<Phasor> k1_, k2_, k3_, k4_, tmp_, emf_;
};

inline PlantState rk4_step(PlantState st, const Scenario& s) {
  Rk4Stepper(s).step(st);
  return st;
}

/// Uniformly sampled run, row 0 being the initial state.
struct Trajectory {
  std::size_t n = 0;
  std::vector<double> t;
  std::vector<Phasor> x;         ///< row-major, n per sample
  std::vector<Phasor> v_o;
  std::vector<Phasor> currents;  ///< row-major, n per sample
  bool diverged = false;
  std::string diagnostic;

  std::size_t samples() const noexcept { return t.size(); }
  std::span<const Phasor> x_at(std::size_t k) const { return {x.data() + k * n, n}; }
  std::span<const Phasor> currents_at(std::size_t k) const { return {currents.data() + k * n, n}; }

  /// Time series of one inverter's state.
  PhasorSeries state_series(std::size_t i) const {
    PhasorSeries ps;
    ps.t = t;
    ps.x.reserve(samples());
    for (std::size_t k = 0; k < samples(); ++k) ps.x.push_back(x[k * n + i]);
    return ps;
  }

  void append(const PlantState& st, const NetworkSample& ns) {
    t.push_back(st.t);
    x.insert(x.end(), st.x.begin(), st.x.end());
    v_o.push_back(ns.v_o);
    currents.insert(currents.end(), ns.currents.begin(), ns.currents.end());
  }
};

/// Integrates from an explicit initial state. On divergence the partial
/// trajectory is returned with `diverged` set.
inline Trajectory simulate_from(const Scenario& s, PlantState st) {
  validate(s);
  if (st.x.size() != s.size()) throw InputError("simulate: initial state size differs from scenario");
  Trajectory tr;
  tr.n = s.size();
  const std::size_t steps = s.steps();
  tr.t.reserve(steps + 1);
  tr.x.reserve((steps + 1) * tr.n);
  tr.currents.reserve((steps + 1) * tr.n);
  tr.v_o.reserve(steps + 1);

  tr.append(st, network_sample(st.x, s, st.t));
  Rk4Stepper stepper(s);
  for (std::size_t k = 0; k < steps; ++k) {
    try {
      stepper.step(st, k);
    } catch (const DivergenceError& e) {
      tr.diverged = true;
      tr.diagnostic = e.what();
      break;
    }
    tr.append(st, network_sample(st.x, s, st.t));
  }
  return tr;
}

inline Trajectory simulate(const Scenario& s) {
  validate(s);
  return simulate_from(s, init_random(s));
}

} // namespace dvoc
