#pragma once

// Post-processing of simulated trajectories: synchronization error, current
// sharing, steady amplitude and exponential decay-rate fits.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dvoc/errors.hpp"
#include "dvoc/network.hpp"
#include "dvoc/phasor.hpp"
#include "dvoc/simulation.hpp"

namespace dvoc {

inline constexpr double kSyncThreshold = 1e-3;  ///< pu

/// Max pairwise distance between inverter states at every sample.
inline std::vector<double> sync_error(const Trajectory& tr) {
  if (tr.n < 2) throw InputError("sync_error: need at least two inverters");
  std::vector<double> out(tr.samples(), 0.0);
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    const auto x = tr.x_at(k);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j) worst = std::max(worst, distance(x[i], x[j]));
    out[k] = worst;
  }
  return out;
}

/// First time after which the series stays strictly below threshold; nullopt
/// if the last sample is still at or above it.
inline std::optional<double> sync_time(std::span<const double> t, std::span<const double> series,
                                       double threshold = kSyncThreshold) {
  if (t.size() != series.size()) throw InputError("sync_time: length mismatch");
  if (series.empty() || series.back() >= threshold) return std::nullopt;
  std::size_t k = series.size();
  while (k > 0 && series[k - 1] < threshold) --k;
  return t[k];
}

/// Number of trailing samples covering `window` seconds.
inline std::size_t window_samples(const Trajectory& tr, double window) {
  if (tr.samples() < 2) throw InputError("trajectory too short for a trailing window");
  const double dt = tr.t[1] - tr.t[0];
  const auto m = static_cast<std::size_t>(std::llround(window / dt));
  if (m < 1 || m >= tr.samples())
    throw InputError("window of " + std::to_string(window) + " s does not fit the trajectory");
  return m;
}

/// RMS of |i_k| over the trailing window; for a rotating alpha-beta phasor this
/// equals the amplitude.
inline std::vector<double> current_amplitudes(const Trajectory& tr, double window) {
  const std::size_t m = window_samples(tr, window);
  std::vector<double> acc(tr.n, 0.0);
  for (std::size_t k = tr.samples() - m; k < tr.samples(); ++k) {
    const auto c = tr.currents_at(k);
    for (std::size_t i = 0; i < tr.n; ++i) acc[i] += norm_sq(c[i]);
  }
  for (auto& a : acc) a = std::sqrt(a / static_cast<double>(m));
  return acc;
}

struct SharingReport {
  std::vector<double> amplitudes;  ///< per branch
  std::vector<double> ratios;      ///< I_a / I_b for each designated pair
  std::vector<double> predicted;   ///< |Y_a / Y_b| at the end of the run
  double error = 0.0;              ///< max relative deviation from predicted
  bool synchronized = false;
};

inline SharingReport sharing_ratio_report(const Trajectory& tr, const NetworkConfig& net,
                                          double window,
                                          std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                          double sync_threshold = kSyncThreshold) {
  SharingReport r;
  r.amplitudes = current_amplitudes(tr, window);
  const std::size_t m = window_samples(tr, window);
  r.synchronized = true;
  if (tr.n >= 2) {
    const auto err = sync_error(tr);
    r.synchronized = std::all_of(err.end() - static_cast<std::ptrdiff_t>(m), err.end(),
                                 [&](double e) { return e < sync_threshold; });
  }
  const AdmittanceSet y = admittances_at(net, tr.t.back());
  for (const auto& [a, b] : pairs) {
    if (a >= tr.n || b >= tr.n) throw InputError("sharing_ratio_report: pair index out of range");
    r.ratios.push_back(r.amplitudes[a] / r.amplitudes[b]);
    r.predicted.push_back(std::abs(y.branch[a] / y.branch[b]));
    r.error = std::max(r.error, std::abs(r.ratios.back() / r.predicted.back() - 1.0));
  }
  return r;
}

/// Negated least-squares slope of log(series) against t over [t_from, t_to].
/// Non-positive samples are skipped.
inline double fit_decay_rate(std::span<const double> t, std::span<const double> series,
                             double t_from = -INFINITY, double t_to = INFINITY) {
  if (t.size() != series.size()) throw InputError("fit_decay_rate: length mismatch");
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_from || t[k] > t_to || !(series[k] > 0.0)) continue;
    const double y = std::log(series[k]);
    st += t[k];
    sy += y;
    stt += t[k] * t[k];
    sty += t[k] * y;
    ++used;
  }
  if (used < 4) throw InputError("fit_decay_rate: fewer than 4 usable samples");
  const double n = static_cast<double>(used);
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) throw InputError("fit_decay_rate: degenerate time samples");
  return -(n * sty - st * sy) / denom;
}

/// Mean |x_k| over the trailing window.
inline double amplitude_estimate(const Trajectory& tr, std::size_t inverter, double window) {
  if (inverter >= tr.n) throw InputError("amplitude_estimate: inverter index out of range");
  const std::size_t m = window_samples(tr, window);
  double acc = 0.0;
  for (std::size_t k = tr.samples() - m; k < tr.samples(); ++k) acc += norm(tr.x[k * tr.n + inverter]);
  return acc / static_cast<double>(m);
}

struct MetricsOptions {
  double sync_threshold = kSyncThreshold;
  double window = 0.04;  ///< two 50 Hz cycles
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  /// The decay fit stops once the sync error falls below this fraction of its peak.
  double fit_floor = 1e-9;
};

struct MetricsReport {
  std::vector<double> sync_error_series;
  std::optional<double> sync_time;
  std::vector<double> sharing_ratios;
  std::vector<double> predicted_ratios;
  double sharing_ratio_error = 0.0;
  bool sharing_synchronized = false;
  std::vector<double> current_amplitudes;
  double amplitude = 0.0;  ///< mean over inverters of the trailing-window |x_k|
  std::optional<double> fitted_rate;
};

inline MetricsReport compute_metrics(const Trajectory& tr, const NetworkConfig& net,
                                     const MetricsOptions& opt) {
  MetricsReport r;
  if (tr.n >= 2) {
    r.sync_error_series = sync_error(tr);
    r.sync_time = sync_time(tr.t, r.sync_error_series, opt.sync_threshold);

    const auto& e = r.sync_error_series;
    const double peak = *std::max_element(e.begin(), e.end());
    std::size_t stop = std::min<std::size_t>(3, e.size());
    while (stop < e.size() && e[stop] > opt.fit_floor * peak) ++stop;
    if (stop > 3 && peak > 0.0) {
      try {
        r.fitted_rate = fit_decay_rate(std::span(tr.t).subspan(3, stop - 3),
                                       std::span(e).subspan(3, stop - 3));
      } catch (const InputError&) {
      }
    }
  }
  if (tr.samples() > 1) {
    const double dt = tr.t[1] - tr.t[0];
    const double window = std::min(opt.window, dt * static_cast<double>(tr.samples() - 1));
    if (std::llround(window / dt) >= 1) {
      const auto sr = sharing_ratio_report(tr, net, window, opt.pairs, opt.sync_threshold);
      r.current_amplitudes = sr.amplitudes;
      r.sharing_ratios = sr.ratios;
      r.predicted_ratios = sr.predicted;
      r.sharing_ratio_error = sr.error;
      r.sharing_synchronized = sr.synchronized;
      double acc = 0.0;
      for (std::size_t i = 0; i < tr.n; ++i) acc += amplitude_estimate(tr, i, window);
      r.amplitude = acc / static_cast<double>(tr.n);
    }
  }
  return r;
}

} // namespace dvoc
