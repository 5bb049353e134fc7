#pragma once

// Canned wind-plant scenarios. Case I: every branch is the bare collector
// impedance 0.75 Z_pm. Case II: virtual impedance raises the branches to
// 20 * 0.75 Z_pm, except a low-impedance pair at 10.5 * 0.75 Z_pm, and every
// branch carries a start-up impedance (x200 by default) until 0.4 s.
//
// Both cases use the reduced star network: inverter branches in parallel into
// a constant-impedance load at the PCC.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dvoc/dynamics.hpp"
#include "dvoc/errors.hpp"
#include "dvoc/network.hpp"
#include "dvoc/simulation.hpp"

namespace dvoc {

enum class CaseId { I, II };

/// Collector line resistance per km and inductance per km.
inline constexpr double kCollectorR = 0.1153;     // ohm/km
inline constexpr double kCollectorL = 1.05e-3;    // H/km
inline constexpr double kLocalLineScale = 0.75;
inline constexpr double kHighImpedanceScale = 20.0;
inline constexpr double kLowImpedanceScale = 10.5;

struct CaseOptions {
  double kappa = 1.0;
  double load_pu = 1.0;
  double load_angle = 0.0;          ///< rad; 0 is a resistive load
  /// Per-inverter base impedance in ohm. The plant base is this value / n, so
  /// a 1 pu load draws rated power from n inverters.
  double load_base_ohm = 1.0e4;
  double z_t_multiplier = 200.0;    ///< branch impedance multiplier while Z_T is inserted
  double t_z = 0.4;                 ///< s
  bool z_t_jitter = false;          ///< per-branch factor in [0.8, 1.2] on the multiplier
  double t_end = 2.0;
  double dt = 1e-4;
  double norm_bound = 1.0;
  double override_norm = 10.0;      ///< |x_1(0)|
};

/// Which branches sit in the low-impedance group and which pairs compare the groups.
struct CaseLayout {
  std::vector<std::size_t> low_group;
  /// (low-impedance branch, high-impedance branch) pairs, zero-based.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// For the full 33-unit plant the low pair is #11 and #19 compared against #1
/// and #33; desk-scale plants put the low pair at #2 and #n.
inline CaseLayout case_layout(std::size_t n) {
  if (n < 4) throw InputError("case II needs n >= 4 so both impedance groups are populated");
  if (n == 33) return {{10, 18}, {{18, 32}, {10, 0}}};
  return {{1, n - 1}, {{1, 0}, {n - 1, n - 2}}};
}

struct StartUpImpedance {
  double multiplier = 200.0;
  double t_z = 0.4;
  bool jitter = false;
  friend bool operator==(const StartUpImpedance&, const StartUpImpedance&) = default;
};

/// Inserts Z_T = (m - 1) Z_i on every branch until t_z, so the branch carries
/// m times its own impedance. With jitter, m is scaled per branch by a seeded
/// factor in [0.8, 1.2].
inline void attach_start_up_impedance(NetworkConfig& net, const StartUpImpedance& zt,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5a17'c0de'2024'0001ULL);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  for (auto& b : net.branches) {
    b.extra.reset();
    const double m = zt.multiplier * (zt.jitter ? jitter(rng) : 1.0);
    b.extra = ExtraImpedance{(m - 1.0) * b.at(net.omega_eval, zt.t_z), zt.t_z};
  }
}

inline Scenario build_case(CaseId id, std::size_t n, std::uint64_t seed, const CaseOptions& opt = {}) {
  if (n < 2) throw InputError("build_case: need n >= 2 inverters, got " + std::to_string(n));
  if (id == CaseId::II && n < 4)
    throw InputError("build_case: case II needs n >= 4 inverters, got " + std::to_string(n));

  InverterParams base;
  base.kappa = opt.kappa;
  base.r_f = kLocalLineScale * kCollectorR;
  base.L_f = kLocalLineScale * kCollectorL;

  Scenario s;
  s.params.assign(n, base);
  if (id == CaseId::II) {
    std::vector<double> scale(n, kHighImpedanceScale);
    for (std::size_t i : case_layout(n).low_group) scale[i] = kLowImpedanceScale;
    for (std::size_t i = 0; i < n; ++i) {
      // The physical line stays; the controller emulates the remainder.
      s.params[i].r_v = (scale[i] - 1.0) * base.r_f;
      s.params[i].X_v = (scale[i] - 1.0) * base.omega0 * base.L_f;
    }
  }

  const double z_base = opt.load_base_ohm / static_cast<double>(n);
  s.network = make_network(s.params, std::polar(opt.load_pu * z_base, opt.load_angle), base.omega0);

  if (id == CaseId::II)
    attach_start_up_impedance(s.network, {opt.z_t_multiplier, opt.t_z, opt.z_t_jitter}, seed);

  s.t_end = opt.t_end;
  s.dt = opt.dt;
  s.init.seed = seed;
  s.init.norm_bound = opt.norm_bound;
  s.init.overrides = {{0, opt.override_norm}};
  return s;
}

} // namespace dvoc
