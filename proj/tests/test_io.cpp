#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dvoc/cli.hpp"
#include "dvoc/io.hpp"

using namespace dvoc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / ("dvoc_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DVOC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(ParseScenario, MinimalCaseFileUsesDefaults) {
  const auto spec = parse_scenario(Json::parse(R"({"case": "II", "n": 4})"));
  const auto expected = build_case(CaseId::II, 4, 0);
  EXPECT_EQ(spec.scenario, expected);
  EXPECT_EQ(spec.sharing_pairs, case_layout(4).pairs);
  EXPECT_FALSE(spec.sweep.has_value());
}

TEST(ParseScenario, ErrorsNameTheOffendingKey) {
  try {
    parse_scenario(Json::parse(R"({"case": "I", "n": 4, "defaults": {"xi": -1}})"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.key().find("xi"), std::string::npos) << e.key();
  }
  try {
    parse_scenario(Json::parse(R"({"case": "I", "n": 4, "bogus": 1})"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "bogus");
  }
  try {
    parse_scenario(Json::parse(R"({"n": 2, "dt": 0.01})"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "dt");
  }
  EXPECT_THROW(parse_scenario(Json::parse(R"({"case": "III", "n": 4})")), ParseError);
  EXPECT_THROW(parse_scenario(Json::parse(R"({"case": "II", "n": 3})")), ParseError);
  EXPECT_THROW(parse_scenario(Json::parse(R"({"n": 2, "init": {"overrides": [{"inverter": 3, "norm": 1}]}})")),
               ParseError);
}

TEST(ParseScenario, RoundTripsThroughJson) {
  const char* docs[] = {
      R"({"case": "II", "n": 6, "seed": 9, "z_t": {"multiplier": 150, "t_z": 0.3, "jitter": true}})",
      R"({"case": "I", "n": 3, "t_end": 0.25, "defaults": {"kappa": 0.5},
          "disturbance": {"inverter": 2, "amplitude": 0.1, "waveform": "constant"},
          "sweep": {"kappa": [0, 1], "simulate": true}})",
      R"({"inverters": [{"r_f": 0.1, "L_f": 0.001}, {"r_f": 0.3, "L_f": 0.002, "xi": 4}],
          "network": {"z_net": {"re": 30, "im": 4}}, "init": {"norm_bound": 0.5,
          "overrides": [{"inverter": 2, "norm": 3}]}, "sharing_pairs": [[1, 2]]})"};
  for (const char* d : docs) {
    const auto spec = parse_scenario(Json::parse(d));
    EXPECT_EQ(parse_scenario(to_json(spec)), spec) << d;
    EXPECT_EQ(parse_scenario(Json::parse(to_json(spec).dump())), spec) << d;
  }
}

TEST(ApplyOverride, SetsNestedValuesWithOneBasedIndices) {
  Json doc = Json::parse(R"({"inverters": [{"xi": 1}, {"xi": 2}]})");
  apply_override(doc, "inverters.2.kappa=0.5");
  apply_override(doc, "load.pu=2");
  apply_override(doc, "case=II");
  EXPECT_EQ(doc["inverters"][1]["kappa"], 0.5);
  EXPECT_EQ(doc["inverters"][1]["xi"], 2);
  EXPECT_EQ(doc["load"]["pu"], 2);
  EXPECT_EQ(doc["case"], "II");
  EXPECT_THROW(apply_override(doc, "novalue"), ParseError);
  EXPECT_THROW(apply_override(doc, "inverters.0.xi=1"), ParseError);
}

TEST(Csv, OneRowPerSampleWithTheDocumentedColumns) {
  auto s = build_case(CaseId::I, 3, 1);
  s.t_end = 2e-4;
  const auto tr = simulate(s);
  ASSERT_EQ(tr.samples(), 3u);
  const fs::path dir = scratch("csv");
  const std::string path = (dir / "ts.csv").string();
  write_timeseries(tr, path);
  const auto table = read_csv(path);
  const std::size_t n = 3;
  EXPECT_EQ(table.header.size(), 1 + 2 * n + 2 + 2 * n + 3 * n);
  EXPECT_EQ(table.header.front(), "t");
  ASSERT_EQ(table.rows.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& row = table.rows[k];
    ASSERT_EQ(row.size(), table.header.size());
    EXPECT_EQ(row[0], tr.t[k]);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(row[1 + 2 * i], tr.x_at(k)[i].alpha);
      EXPECT_EQ(row[2 + 2 * i], tr.x_at(k)[i].beta);
      EXPECT_EQ(row[1 + 2 * n + 2 + 2 * i], tr.currents_at(k)[i].alpha);
      const ThreePhase abc = inv_clarke(tr.currents_at(k)[i]);
      EXPECT_EQ(row[1 + 4 * n + 2 + 3 * i], abc.a);
    }
    EXPECT_EQ(row[1 + 2 * n], tr.v_o[k].alpha);
  }
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 563.38312053790144, 0.0}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
}

TEST(Cli, CertifyPrintsTheDefaultMargin) {
  cli::RunConfig cfg;
  cfg.command = cli::Command::certify;
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(cfg, out, err), cli::kOk);
  EXPECT_NE(out.str().find("553.38"), std::string::npos) << out.str();
}

TEST(Cli, CertifyFailsWithoutFeedback) {
  cli::RunConfig cfg;
  cfg.command = cli::Command::certify;
  cfg.overrides = {"defaults.kappa=0"};
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(cfg, out, err), cli::kCertificateFails);
  EXPECT_EQ(run_cli("certify --set defaults.kappa=0"), cli::kCertificateFails);
  EXPECT_EQ(run_cli("certify"), cli::kOk);
}

TEST(Cli, Case2ReportsTheSharingRatio) {
  const fs::path dir = scratch("case2");
  cli::RunConfig cfg;
  cfg.command = cli::Command::case2;
  cfg.out_dir = dir.string();
  cfg.seed = 3;
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(cfg, out, err), cli::kOk) << err.str();
  const Json report = Json::parse(slurp(dir / "report.json"));
  EXPECT_NEAR(report["metrics"]["sharing_ratio"].get<double>(), 1.905, 0.02 * 1.905);
  EXPECT_EQ(report["status"], "completed");
  EXPECT_TRUE(fs::exists(dir / "timeseries.csv"));
}

TEST(Cli, RepeatedRunsWriteIdenticalBytes) {
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  const std::string args = "case1 --seed 42 --set t_end=0.2 --out ";
  ASSERT_EQ(run_cli(args + a.string()), 0);
  ASSERT_EQ(run_cli(args + b.string()), 0);
  const std::string ca = slurp(a / "timeseries.csv");
  EXPECT_FALSE(ca.empty());
  EXPECT_EQ(ca, slurp(b / "timeseries.csv"));
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
}

TEST(Cli, DivergenceExitsWithCodeTwoAndKeepsPartialOutput) {
  const fs::path dir = scratch("diverge");
  write_file(dir / "s.json", R"({"n": 2, "t_end": 0.1,
      "disturbance": {"inverter": 2, "amplitude": 1e8, "waveform": "constant"}})");
  cli::RunConfig cfg;
  cfg.command = cli::Command::simulate;
  cfg.scenario_path = (dir / "s.json").string();
  cfg.out_dir = (dir / "out").string();
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(cfg, out, err), cli::kDiverged);
  EXPECT_NE(err.str().find("diverge"), std::string::npos) << err.str();
  EXPECT_EQ(Json::parse(slurp(dir / "out" / "report.json"))["status"], "diverged");
}

TEST(Cli, InputAndOutputErrorsExitWithCodeOne) {
  const fs::path dir = scratch("ioerr");
  cli::RunConfig cfg;
  cfg.command = cli::Command::simulate;
  cfg.scenario_path = (dir / "missing.json").string();
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(cfg, out, err), cli::kIoError);

  write_file(dir / "blocker", "x");
  cfg.command = cli::Command::case1;
  cfg.scenario_path.reset();
  cfg.overrides = {"t_end=0.01"};
  cfg.out_dir = (dir / "blocker" / "sub").string();
  EXPECT_EQ(cli::run(cfg, out, err), cli::kIoError);

  write_file(dir / "bad.json", R"({"case": "I", "n": 4, "defaults": {"xi": -1}})");
  cfg.command = cli::Command::simulate;
  cfg.scenario_path = (dir / "bad.json").string();
  cfg.out_dir = (dir / "out").string();
  std::ostringstream err2;
  EXPECT_EQ(cli::run(cfg, out, err2), cli::kIoError);
  EXPECT_NE(err2.str().find("xi"), std::string::npos) << err2.str();
}

TEST(Cli, SweepWritesOneRowPerKappa) {
  const fs::path dir = scratch("sweep");
  cli::RunConfig cfg;
  cfg.command = cli::Command::sweep;
  cfg.out_dir = dir.string();
  cfg.overrides = {"sweep.kappa=[0, 0.5, 1]", "sweep.simulate=true", "t_end=0.05"};
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(cfg, out, err), cli::kOk) << err.str();
  std::istringstream lines(slurp(dir / "sweep.csv"));
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].substr(0, 2), "0,");
  EXPECT_NE(rows[1].find(",0,"), std::string::npos);  // kappa = 0 does not pass
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(dir / ("kappa_" + std::to_string(i)) / "report.json"));
}
