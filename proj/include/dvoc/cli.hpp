#pragma once

// Command dispatch for the dvoc tool. Exit codes: 0 success (certificate
// passes), 1 I/O or input error, 2 simulation diverged, 3 certificate fails.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dvoc/contraction.hpp"
#include "dvoc/io.hpp"
#include "dvoc/metrics.hpp"
#include "dvoc/scenarios.hpp"
#include "dvoc/simulation.hpp"

namespace dvoc::cli {

enum class Command { certify, simulate, case1, case2, sweep };

enum ExitCode : int { kOk = 0, kIoError = 1, kDiverged = 2, kCertificateFails = 3 };

struct RunConfig {
  Command command = Command::certify;
  std::optional<std::string> scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;  ///< key=value
};

inline std::optional<Command> parse_command(const std::string& s) {
  if (s == "certify") return Command::certify;
  if (s == "simulate") return Command::simulate;
  if (s == "case1") return Command::case1;
  if (s == "case2") return Command::case2;
  if (s == "sweep") return Command::sweep;
  return std::nullopt;
}

inline constexpr std::size_t kDeskInverters = 4;

/// Scenario document for a command: file contents (if any), the case implied
/// by case1/case2, then --seed and --set overrides.
inline Json scenario_document(const RunConfig& cfg) {
  Json doc = cfg.scenario_path ? read_json_file(*cfg.scenario_path) : Json::object();
  if (!doc.is_object()) throw ParseError("<root>", "expected an object");
  const bool has_shape = doc.contains("n") || doc.contains("inverters");
  switch (cfg.command) {
    case Command::case1: doc["case"] = "I"; break;
    case Command::case2: doc["case"] = "II"; break;
    case Command::simulate:
      if (!cfg.scenario_path) throw ParseError("--scenario", "simulate needs a scenario file");
      break;
    case Command::certify:
    case Command::sweep:
      if (!cfg.scenario_path) doc["case"] = "I";
      break;
  }
  if (!has_shape && doc.contains("case")) doc["n"] = kDeskInverters;
  if (cfg.seed) doc["seed"] = *cfg.seed;
  for (const auto& o : cfg.overrides) apply_override(doc, o);
  return doc;
}

struct RunOutcome {
  Trajectory trajectory;
  MetricsReport metrics;
  Json report;
};

inline RunOutcome run_scenario(const ScenarioSpec& spec) {
  RunOutcome r;
  r.trajectory = simulate(spec.scenario);
  MetricsOptions mo;
  mo.pairs = spec.sharing_pairs;
  r.metrics = compute_metrics(r.trajectory, spec.scenario.network, mo);
  r.report = build_report(spec, r.trajectory, r.metrics);
  return r;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline void write_outputs(const RunOutcome& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_timeseries(r.trajectory, (dir / "timeseries.csv").string());
  write_text(dir / "report.json", r.report.dump(2) + "\n");
}

inline int run_certify(const ScenarioSpec& spec, std::ostream& out) {
  bool all = true;
  Json per = Json::array();
  for (const auto& p : spec.scenario.params) {
    const auto c = certify(p);
    all = all && c.pass;
    per.push_back(to_json(c));
  }
  const CertificateReport worst = worst_certificate(spec.scenario);
  out << "margin_c = " << format_double(worst.margin_c) << " 1/s  ("
      << (worst.pass ? "PASS: contracting" : "FAIL: not contracting") << ")\n";
  out << Json{{"certificate", to_json(worst)}, {"per_inverter", per}}.dump(2) << "\n";
  return all ? kOk : kCertificateFails;
}

inline int run_sweep(const ScenarioSpec& spec, const std::filesystem::path& dir, std::ostream& out) {
  std::vector<double> grid = spec.sweep ? spec.sweep->kappa : std::vector<double>{};
  if (grid.empty())
    for (int k = 0; k <= 20; ++k) grid.push_back(0.1 * k);
  const bool simulate_each = spec.sweep && spec.sweep->simulate;

  std::vector<ScenarioSpec> specs;
  for (double kappa : grid) {
    ScenarioSpec s = spec;
    s.sweep.reset();
    for (auto& p : s.scenario.params) p.kappa = kappa;
    specs.push_back(std::move(s));
  }

  // Each run owns its scenario and output subdirectory; no shared mutable state.
  std::vector<std::optional<RunOutcome>> outcomes(specs.size());
  if (simulate_each) {
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t base = 0; base < specs.size(); base += workers) {
      std::vector<std::future<RunOutcome>> batch;
      for (std::size_t i = base; i < std::min(specs.size(), base + workers); ++i)
        batch.push_back(std::async(std::launch::async, [&specs, i, &dir] {
          RunOutcome r = run_scenario(specs[i]);
          write_outputs(r, dir / ("kappa_" + std::to_string(i)));
          return r;
        }));
      for (std::size_t i = 0; i < batch.size(); ++i) outcomes[base + i] = batch[i].get();
    }
  }

  std::filesystem::create_directories(dir);
  std::string table = "kappa,kappa_beta,margin_c,pass,lambda_max_sampled";
  if (simulate_each) table += ",status,sync_time,sync_error_final,amplitude";
  table += "\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto c = worst_certificate(specs[i].scenario);
    const auto& p = c.params_echo;
    table += format_double(p.kappa) + "," + format_double(p.kappa_beta()) + "," +
             format_double(c.margin_c) + "," + (c.pass ? "1" : "0") + "," +
             format_double(c.lambda_max_sampled);
    if (outcomes[i]) {
      const auto& o = *outcomes[i];
      table += std::string(",") + (o.trajectory.diverged ? "diverged" : "completed") + ",";
      table += o.metrics.sync_time ? format_double(*o.metrics.sync_time) : "nan";
      table += "," + (o.metrics.sync_error_series.empty() ? "nan" : format_double(o.metrics.sync_error_series.back()));
      table += "," + format_double(o.metrics.amplitude);
    }
    table += "\n";
  }
  write_text(dir / "sweep.csv", table);
  out << table;
  return kOk;
}

inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    const ScenarioSpec spec = parse_scenario(scenario_document(cfg));
    switch (cfg.command) {
      case Command::certify: return run_certify(spec, out);
      case Command::sweep: return run_sweep(spec, cfg.out_dir, out);
      case Command::simulate:
      case Command::case1:
      case Command::case2: {
        const RunOutcome r = run_scenario(spec);
        write_outputs(r, cfg.out_dir);
        const auto& m = r.report["metrics"];
        out << "status: " << r.report["status"].get<std::string>() << "\n"
            << "samples: " << r.trajectory.samples() << "\n"
            << "margin_c: " << format_double(r.report["certificate"]["margin_c"].get<double>()) << "\n"
            << "sync_time: " << m["sync_time"].dump() << "\n"
            << "sharing_ratio: " << m["sharing_ratio"].dump() << "\n"
            << "amplitude: " << format_double(r.metrics.amplitude) << "\n"
            << "wrote " << (std::filesystem::path(cfg.out_dir) / "timeseries.csv").string() << ", "
            << (std::filesystem::path(cfg.out_dir) / "report.json").string() << "\n";
        if (r.trajectory.diverged) {
          err << "error: " << r.trajectory.diagnostic << "\n";
          return kDiverged;
        }
        return kOk;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kIoError;
}

} // namespace dvoc::cli
