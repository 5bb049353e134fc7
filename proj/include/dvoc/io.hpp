#pragma once

// Scenario files (JSON, strict), time-series CSV and the JSON run report.
//
// A scenario file is either fully explicit (the form `to_json` writes) or a
// short form seeded from a canned case:
//
//   { "case": "II", "n": 4, "seed": 7 }
//
// Optional keys in either form: "defaults" (parameters applied to every
// inverter), "inverters" (per-inverter parameter objects), "load" or
// "network.z_net", "z_t" or "network.extra_impedance", "init",
// "disturbance", "sharing_pairs", "sweep". Unknown keys are rejected.
// Inverter indices in files are 1-based.

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dvoc/contraction.hpp"
#include "dvoc/errors.hpp"
#include "dvoc/metrics.hpp"
#include "dvoc/network.hpp"
#include "dvoc/scenarios.hpp"
#include "dvoc/simulation.hpp"

namespace dvoc {

using Json = nlohmann::json;

struct SweepSpec {
  std::vector<double> kappa;
  bool simulate = false;
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// A scenario plus the post-processing choices that travel with it.
struct ScenarioSpec {
  Scenario scenario;
  std::vector<std::pair<std::size_t, std::size_t>> sharing_pairs;  ///< zero-based
  std::optional<SweepSpec> sweep;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(where.empty() ? "<root>" : where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) throw ParseError(where.empty() ? k : where + "." + k, "unknown key");
}

inline std::string join_key(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline double get_number(const Json& obj, const std::string& where, const char* key) {
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(join_key(where, key), "expected a number");
  return v.get<double>();
}

inline void read_number(const Json& obj, const std::string& where, const char* key, double& out) {
  if (obj.contains(key)) out = get_number(obj, where, key);
}

inline std::size_t get_index(const Json& obj, const std::string& where, const char* key,
                             std::size_t n) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1 || static_cast<std::size_t>(v.get<long long>()) > n)
    throw ParseError(join_key(where, key), "expected an inverter number in 1.." + std::to_string(n));
  return static_cast<std::size_t>(v.get<long long>()) - 1;
}

inline ComplexValue get_complex(const Json& v, const std::string& key) {
  reject_unknown(v, key, {"re", "im"});
  if (!v.contains("re") || !v.contains("im")) throw ParseError(key, "expected {\"re\", \"im\"}");
  return {get_number(v, key, "re"), get_number(v, key, "im")};
}

inline Json complex_json(const ComplexValue& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline void apply_params(const Json& obj, const std::string& where, InverterParams& p) {
  reject_unknown(obj, where, {"xi", "x_nom_sq2", "omega0", "kappa", "beta", "r_f", "L_f", "r_v", "X_v"});
  read_number(obj, where, "xi", p.xi);
  read_number(obj, where, "x_nom_sq2", p.x_nom_sq2);
  read_number(obj, where, "omega0", p.omega0);
  read_number(obj, where, "kappa", p.kappa);
  read_number(obj, where, "beta", p.beta);
  read_number(obj, where, "r_f", p.r_f);
  read_number(obj, where, "L_f", p.L_f);
  read_number(obj, where, "r_v", p.r_v);
  read_number(obj, where, "X_v", p.X_v);
  try {
    validate(p);
  } catch (const ParseError& e) {
    throw ParseError(join_key(where, e.key()), e.reason());
  }
}

} // namespace detail

inline Json to_json(const InverterParams& p) {
  return {{"xi", p.xi},   {"x_nom_sq2", p.x_nom_sq2}, {"omega0", p.omega0},
          {"kappa", p.kappa}, {"beta", p.beta},       {"r_f", p.r_f},
          {"L_f", p.L_f}, {"r_v", p.r_v},             {"X_v", p.X_v}};
}

/// Fully explicit form; parse_scenario(to_json(s)) == s.
inline Json to_json(const ScenarioSpec& spec) {
  const Scenario& s = spec.scenario;
  Json j;
  j["seed"] = s.init.seed;
  j["t_end"] = s.t_end;
  j["dt"] = s.dt;
  Json inv = Json::array();
  for (const auto& p : s.params) inv.push_back(to_json(p));
  j["inverters"] = inv;
  Json extra = Json::array();
  for (const auto& b : s.network.branches) {
    if (b.extra)
      extra.push_back({{"re", b.extra->z.real()}, {"im", b.extra->z.imag()}, {"t_z", b.extra->t_remove}});
    else
      extra.push_back(nullptr);
  }
  j["network"] = {{"z_net", detail::complex_json(s.network.z_net)},
                  {"omega_eval", s.network.omega_eval},
                  {"extra_impedance", extra}};
  Json ov = Json::array();
  for (const auto& o : s.init.overrides) ov.push_back({{"inverter", o.index + 1}, {"norm", o.norm}});
  j["init"] = {{"norm_bound", s.init.norm_bound}, {"overrides", ov}};
  if (s.disturbance)
    j["disturbance"] = {{"inverter", s.disturbance->index + 1},
                        {"amplitude", s.disturbance->amplitude},
                        {"waveform", s.disturbance->waveform == Waveform::constant ? "constant" : "rotating"}};
  Json pairs = Json::array();
  for (const auto& [a, b] : spec.sharing_pairs) pairs.push_back({a + 1, b + 1});
  j["sharing_pairs"] = pairs;
  if (spec.sweep) j["sweep"] = {{"kappa", spec.sweep->kappa}, {"simulate", spec.sweep->simulate}};
  return j;
}

/// Strict parse with defaults; every error names the offending key.
inline ScenarioSpec parse_scenario(const Json& j) {
  using namespace detail;
  reject_unknown(j, "", {"case", "n", "seed", "t_end", "dt", "defaults", "inverters", "load", "z_t",
                         "network", "init", "disturbance", "sharing_pairs", "sweep"});

  std::optional<CaseId> case_id;
  if (j.contains("case")) {
    const Json& c = j.at("case");
    if (c == "I" || c == "1" || c == 1) {
      case_id = CaseId::I;
    } else if (c == "II" || c == "2" || c == 2) {
      case_id = CaseId::II;
    } else {
      throw ParseError("case", "expected \"I\" or \"II\"");
    }
  }

  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
      throw ParseError("seed", "expected a non-negative integer");
    seed = j.at("seed").get<std::uint64_t>();
  }

  std::size_t n = 0;
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 1)
      throw ParseError("n", "expected a positive integer");
    n = j.at("n").get<std::size_t>();
  }
  if (j.contains("inverters")) {
    if (!j.at("inverters").is_array()) throw ParseError("inverters", "expected an array");
    const std::size_t m = j.at("inverters").size();
    if (n != 0 && m != n) throw ParseError("inverters", "length differs from n");
    n = m;
  }
  if (n == 0) throw ParseError("n", "missing (give \"n\" or an \"inverters\" list)");

  CaseOptions copt;
  if (j.contains("load")) {
    const Json& l = j.at("load");
    reject_unknown(l, "load", {"pu", "angle", "base_ohm"});
    read_number(l, "load", "pu", copt.load_pu);
    read_number(l, "load", "angle", copt.load_angle);
    read_number(l, "load", "base_ohm", copt.load_base_ohm);
    if (!(copt.load_pu > 0.0)) throw ParseError("load.pu", "must be > 0");
    if (!(copt.load_base_ohm > 0.0)) throw ParseError("load.base_ohm", "must be > 0");
  }
  std::optional<StartUpImpedance> zt;
  if (j.contains("z_t")) {
    const Json& z = j.at("z_t");
    if (z.is_null()) {
      zt = StartUpImpedance{1.0, 0.0, false};
    } else {
      reject_unknown(z, "z_t", {"multiplier", "t_z", "jitter"});
      zt = StartUpImpedance{};
      read_number(z, "z_t", "multiplier", zt->multiplier);
      read_number(z, "z_t", "t_z", zt->t_z);
      if (z.contains("jitter")) {
        if (!z.at("jitter").is_boolean()) throw ParseError("z_t.jitter", "expected a boolean");
        zt->jitter = z.at("jitter").get<bool>();
      }
      if (!(zt->multiplier >= 1.0)) throw ParseError("z_t.multiplier", "must be >= 1");
      if (!(zt->t_z >= 0.0)) throw ParseError("z_t.t_z", "must be >= 0");
    }
  }

  ScenarioSpec spec;
  Scenario& s = spec.scenario;
  if (case_id) {
    if (*case_id == CaseId::II && n < 4) throw ParseError("n", "case II needs n >= 4");
    if (n < 2) throw ParseError("n", "a case needs n >= 2");
    if (zt) {
      copt.z_t_multiplier = zt->multiplier;
      copt.t_z = zt->t_z;
      copt.z_t_jitter = zt->jitter;
    }
    s = build_case(*case_id, n, seed, copt);
    if (*case_id == CaseId::II) {
      spec.sharing_pairs = case_layout(n).pairs;
      if (!zt) zt = StartUpImpedance{copt.z_t_multiplier, copt.t_z, copt.z_t_jitter};
    }
  } else {
    InverterParams line;
    line.r_f = kLocalLineScale * kCollectorR;
    line.L_f = kLocalLineScale * kCollectorL;
    s.params.assign(n, line);
    s.init.seed = seed;
  }
  if (!case_id || spec.sharing_pairs.empty())
    for (std::size_t k = 1; k < n; ++k) spec.sharing_pairs.emplace_back(k, 0);

  if (j.contains("defaults"))
    for (auto& p : s.params) apply_params(j.at("defaults"), "defaults", p);
  if (j.contains("inverters"))
    for (std::size_t i = 0; i < n; ++i)
      apply_params(j.at("inverters")[i], "inverters[" + std::to_string(i + 1) + "]", s.params[i]);

  // Network: branches always mirror the resolved inverter parameters.
  ComplexValue z_net = case_id ? s.network.z_net
                               : std::polar(copt.load_pu * copt.load_base_ohm / static_cast<double>(n),
                                            copt.load_angle);
  double omega_eval = s.params.front().omega0;
  std::optional<std::vector<std::optional<ExtraImpedance>>> explicit_extra;
  if (j.contains("network")) {
    const Json& net = j.at("network");
    reject_unknown(net, "network", {"z_net", "omega_eval", "extra_impedance"});
    if (net.contains("z_net")) {
      if (j.contains("load")) throw ParseError("network.z_net", "conflicts with \"load\"");
      z_net = get_complex(net.at("z_net"), "network.z_net");
    }
    read_number(net, "network", "omega_eval", omega_eval);
    if (net.contains("extra_impedance")) {
      if (zt && j.contains("z_t")) throw ParseError("network.extra_impedance", "conflicts with \"z_t\"");
      const Json& ex = net.at("extra_impedance");
      if (!ex.is_array() || ex.size() != n)
        throw ParseError("network.extra_impedance", "expected an array with one entry per inverter");
      explicit_extra.emplace();
      for (std::size_t i = 0; i < n; ++i) {
        const std::string key = "network.extra_impedance[" + std::to_string(i + 1) + "]";
        if (ex[i].is_null()) {
          explicit_extra->push_back(std::nullopt);
          continue;
        }
        reject_unknown(ex[i], key, {"re", "im", "t_z"});
        if (!ex[i].contains("re") || !ex[i].contains("im") || !ex[i].contains("t_z"))
          throw ParseError(key, "expected {\"re\", \"im\", \"t_z\"}");
        explicit_extra->push_back(ExtraImpedance{
            {get_number(ex[i], key, "re"), get_number(ex[i], key, "im")}, get_number(ex[i], key, "t_z")});
      }
    }
  }
  s.network = make_network(s.params, z_net, omega_eval);
  if (explicit_extra) {
    for (std::size_t i = 0; i < n; ++i) s.network.branches[i].extra = (*explicit_extra)[i];
  } else if (zt && zt->multiplier > 1.0) {
    attach_start_up_impedance(s.network, *zt, seed);
  }

  read_number(j, "", "t_end", s.t_end);
  read_number(j, "", "dt", s.dt);

  if (j.contains("init")) {
    const Json& in = j.at("init");
    reject_unknown(in, "init", {"norm_bound", "overrides"});
    read_number(in, "init", "norm_bound", s.init.norm_bound);
    if (in.contains("overrides")) {
      if (!in.at("overrides").is_array()) throw ParseError("init.overrides", "expected an array");
      s.init.overrides.clear();
      for (const auto& o : in.at("overrides")) {
        reject_unknown(o, "init.overrides", {"inverter", "norm"});
        if (!o.contains("inverter") || !o.contains("norm"))
          throw ParseError("init.overrides", "each entry needs \"inverter\" and \"norm\"");
        s.init.overrides.push_back({get_index(o, "init.overrides", "inverter", n),
                                    get_number(o, "init.overrides", "norm")});
      }
    }
  }

  if (j.contains("disturbance") && !j.at("disturbance").is_null()) {
    const Json& d = j.at("disturbance");
    reject_unknown(d, "disturbance", {"inverter", "amplitude", "waveform"});
    for (const char* k : {"inverter", "amplitude"})
      if (!d.contains(k)) throw ParseError(join_key("disturbance", k), "missing");
    Disturbance dist;
    dist.index = get_index(d, "disturbance", "inverter", n);
    dist.amplitude = get_number(d, "disturbance", "amplitude");
    if (d.contains("waveform")) {
      const Json& w = d.at("waveform");
      if (w == "constant") {
        dist.waveform = Waveform::constant;
      } else if (w == "rotating") {
        dist.waveform = Waveform::rotating;
      } else {
        throw ParseError("disturbance.waveform", "expected \"constant\" or \"rotating\"");
      }
    }
    s.disturbance = dist;
  }

  if (j.contains("sharing_pairs")) {
    const Json& sp = j.at("sharing_pairs");
    if (!sp.is_array()) throw ParseError("sharing_pairs", "expected an array of [a, b] pairs");
    spec.sharing_pairs.clear();
    for (const auto& pr : sp) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() || !pr[1].is_number_integer())
        throw ParseError("sharing_pairs", "expected [a, b] with 1-based inverter numbers");
      const long long a = pr[0].get<long long>(), b = pr[1].get<long long>();
      if (a < 1 || b < 1 || static_cast<std::size_t>(a) > n || static_cast<std::size_t>(b) > n)
        throw ParseError("sharing_pairs", "inverter number out of range");
      spec.sharing_pairs.emplace_back(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
    }
  }

  if (j.contains("sweep")) {
    const Json& sw = j.at("sweep");
    reject_unknown(sw, "sweep", {"kappa", "simulate"});
    SweepSpec sweep;
    if (sw.contains("kappa")) {
      if (!sw.at("kappa").is_array() || sw.at("kappa").empty())
        throw ParseError("sweep.kappa", "expected a non-empty array of numbers");
      for (const auto& k : sw.at("kappa")) {
        if (!k.is_number() || k.get<double>() < 0.0) throw ParseError("sweep.kappa", "entries must be >= 0");
        sweep.kappa.push_back(k.get<double>());
      }
    }
    if (sw.contains("simulate")) {
      if (!sw.at("simulate").is_boolean()) throw ParseError("sweep.simulate", "expected a boolean");
      sweep.simulate = sw.at("simulate").get<bool>();
    }
    spec.sweep = sweep;
  }

  validate(s);
  return spec;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path, std::string("invalid JSON: ") + e.what());
  }
}

inline ScenarioSpec load_scenario(const std::string& path) { return parse_scenario(read_json_file(path)); }

/// Applies `a.b.c=value` to a JSON document. Numeric path segments index
/// arrays 1-based (`inverters.2.kappa`). The value is parsed as JSON when
/// possible and kept as a string otherwise.
inline void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ParseError(assignment, "expected key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::parse_error&) {
    value = raw;
  }
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (seg.empty()) throw ParseError(path, "empty path segment");
    const bool numeric = seg.find_first_not_of("0123456789") == std::string::npos;
    Json* next = nullptr;
    if (numeric) {
      const std::size_t idx = std::stoul(seg);
      if (idx < 1) throw ParseError(path, "array positions are 1-based");
      if (node->is_null()) *node = Json::array();
      if (!node->is_array()) throw ParseError(path, "'" + seg + "' indexes a non-array");
      while (node->size() < idx) node->push_back(Json::object());
      next = &(*node)[idx - 1];
    } else {
      if (node->is_null()) *node = Json::object();
      if (!node->is_object()) throw ParseError(path, "'" + seg + "' is not an object member");
      next = &(*node)[seg];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string timeseries_header(std::size_t n) {
  std::string h = "t";
  for (std::size_t i = 1; i <= n; ++i)
    h += ",x_alpha_" + std::to_string(i) + ",x_beta_" + std::to_string(i);
  h += ",v_o_alpha,v_o_beta";
  for (std::size_t i = 1; i <= n; ++i)
    h += ",i_alpha_" + std::to_string(i) + ",i_beta_" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i)
    h += ",i_a_" + std::to_string(i) + ",i_b_" + std::to_string(i) + ",i_c_" + std::to_string(i);
  return h;
}

/// One row per sample, 17 significant digits, phase currents via inverse Clarke.
inline void write_timeseries(const Trajectory& tr, std::ostream& out) {
  out << timeseries_header(tr.n) << '\n';
  std::string row;
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    row = format_double(tr.t[k]);
    auto put = [&row](double v) {
      row += ',';
      row += format_double(v);
    };
    for (const auto& x : tr.x_at(k)) {
      put(x.alpha);
      put(x.beta);
    }
    put(tr.v_o[k].alpha);
    put(tr.v_o[k].beta);
    const auto cur = tr.currents_at(k);
    for (const auto& i : cur) {
      put(i.alpha);
      put(i.beta);
    }
    for (const auto& i : cur) {
      const ThreePhase abc = inv_clarke(i);
      put(abc.a);
      put(abc.b);
      put(abc.c);
    }
    row += '\n';
    out << row;
  }
}

inline void write_timeseries(const Trajectory& tr, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_timeseries(tr, out);
  out.flush();
  if (!out) throw Error("write failed for '" + path + "'");
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{}) throw Error("bad number '" + cell + "' in '" + path + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const CertificateReport& r) {
  Json j;
  j["margin_c"] = r.margin_c;
  j["pass"] = r.pass;
  j["lambda_max_sampled"] = std::isfinite(r.lambda_max_sampled) ? Json(r.lambda_max_sampled) : Json(nullptr);
  j["error_ball_radius"] = r.error_ball_radius ? Json(*r.error_ball_radius) : Json(nullptr);
  j["params"] = to_json(r.params_echo);
  return j;
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

/// The sync-error series is decimated to at most `max_points` entries.
inline Json to_json(const MetricsReport& m, double dt, std::size_t max_points = 2001) {
  Json j;
  const std::size_t n = m.sync_error_series.size();
  const std::size_t stride = n <= max_points ? 1 : (n + max_points - 2) / (max_points - 1);
  Json series = Json::array();
  for (std::size_t k = 0; k < n; k += stride) series.push_back(m.sync_error_series[k]);
  j["sync_error_series"] = {{"dt", dt * static_cast<double>(stride)}, {"values", series}};
  j["sync_error_final"] = n ? Json(m.sync_error_series.back()) : Json(nullptr);
  j["sync_time"] = optional_json(m.sync_time);
  j["sharing_ratios"] = m.sharing_ratios;
  j["predicted_ratios"] = m.predicted_ratios;
  double mean = 0.0;
  for (double r : m.sharing_ratios) mean += r;
  j["sharing_ratio"] = m.sharing_ratios.empty() ? Json(nullptr)
                                                : Json(mean / static_cast<double>(m.sharing_ratios.size()));
  j["sharing_ratio_error"] = m.sharing_ratio_error;
  j["sharing_synchronized"] = m.sharing_synchronized;
  j["current_amplitudes"] = m.current_amplitudes;
  j["amplitude"] = m.amplitude;
  j["fitted_rate"] = optional_json(m.fitted_rate);
  return j;
}

/// Certificate of the inverter with the smallest margin.
inline CertificateReport worst_certificate(const Scenario& s) {
  CertificateReport worst = certify(s.params.front());
  for (std::size_t i = 1; i < s.size(); ++i) {
    CertificateReport c = certify(s.params[i]);
    if (c.margin_c < worst.margin_c) worst = c;
  }
  return worst;
}

inline Json build_report(const ScenarioSpec& spec, const Trajectory& tr, const MetricsReport& m) {
  const Scenario& s = spec.scenario;
  Json j;
  j["scenario"] = to_json(spec);
  j["certificate"] = to_json(worst_certificate(s));
  j["metrics"] = to_json(m, s.dt);
  j["k_sh"] = detail::complex_json(k_sh(s.network, INFINITY));
  try {
    const auto steady = synchronized_steady(s.params.front(), s.network);
    j["synchronized_steady"] = {{"r_star", steady.r_star},
                                {"v_pcc_amplitude", steady.v_pcc_amplitude},
                                {"current_amplitudes", steady.current_amplitudes}};
  } catch (const OscillatorDeathError& e) {
    j["synchronized_steady"] = {{"oscillator_death", true}, {"radicand", e.radicand()}};
  }
  j["status"] = tr.diverged ? "diverged" : "completed";
  j["samples"] = tr.samples();
  if (tr.diverged) j["diagnostic"] = tr.diagnostic;
  return j;
}

} // namespace dvoc
