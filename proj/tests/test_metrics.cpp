#include <gtest/gtest.h>

#include <cmath>

#include "dvoc/contraction.hpp"
#include "dvoc/metrics.hpp"
#include "dvoc/scenarios.hpp"

using namespace dvoc;

namespace {

Trajectory hand_trajectory(std::vector<double> t, std::vector<std::vector<Phasor>> rows) {
  Trajectory tr;
  tr.n = rows.front().size();
  for (std::size_t k = 0; k < t.size(); ++k) {
    tr.t.push_back(t[k]);
    tr.x.insert(tr.x.end(), rows[k].begin(), rows[k].end());
    tr.v_o.push_back({0, 0});
    tr.currents.insert(tr.currents.end(), rows[k].size(), Phasor{0, 0});
  }
  return tr;
}

Scenario two_branch(double z_net_ohm, double second_scale = 1.0) {
  InverterParams p;
  p.r_f = kLocalLineScale * kCollectorR;
  p.L_f = kLocalLineScale * kCollectorL;
  InverterParams q = p;
  q.r_f *= second_scale;
  q.L_f *= second_scale;
  Scenario s;
  s.params = {p, q};
  s.network = make_network(s.params, {z_net_ohm, 0.0}, p.omega0);
  s.t_end = 0.5;
  s.init.seed = 11;
  return s;
}

} // namespace

TEST(BuildCase, CaseIIFullPlantLayout) {
  const auto s = build_case(CaseId::II, 33, 0);
  ASSERT_EQ(s.size(), 33u);
  const double w = s.params[0].omega0;
  const ComplexValue zpm{kLocalLineScale * kCollectorR, w * kLocalLineScale * kCollectorL};
  for (std::size_t i = 0; i < 33; ++i) {
    const double scale = (i == 10 || i == 18) ? kLowImpedanceScale : kHighImpedanceScale;
    const ComplexValue z = s.network.branches[i].at(w, 1.0);
    EXPECT_NEAR(std::abs(z - scale * zpm), 0.0, 1e-12) << "branch " << i;
    const ComplexValue z_early = s.network.branches[i].at(w, 0.0);
    EXPECT_NEAR(std::abs(z_early - 200.0 * scale * zpm), 0.0, 1e-9) << "branch " << i;
  }
  EXPECT_EQ(s.init.overrides.size(), 1u);
  EXPECT_EQ(s.init.overrides[0].index, 0u);
  EXPECT_DOUBLE_EQ(s.init.overrides[0].norm, 10.0);
  EXPECT_NO_THROW(validate(s));
}

TEST(BuildCase, CaseIHasIdenticalBranchesAndNoStartUpImpedance) {
  const auto s = build_case(CaseId::I, 4, 0);
  for (const auto& b : s.network.branches) {
    EXPECT_FALSE(b.extra.has_value());
    EXPECT_EQ(b.r_f, s.network.branches[0].r_f);
    EXPECT_EQ(b.L_f, s.network.branches[0].L_f);
  }
  EXPECT_NO_THROW(validate(s));
}

TEST(BuildCase, RejectsTooFewInverters) {
  EXPECT_THROW(build_case(CaseId::I, 1, 0), InputError);
  EXPECT_THROW(build_case(CaseId::II, 3, 0), InputError);
}

TEST(BuildCase, JitterStaysWithinBounds) {
  CaseOptions opt;
  opt.z_t_jitter = true;
  const auto s = build_case(CaseId::II, 8, 4, opt);
  const double w = s.params[0].omega0;
  for (const auto& b : s.network.branches) {
    const double m = std::abs(b.at(w, 0.0)) / std::abs(b.at(w, 1.0));
    EXPECT_GE(m, 0.8 * 200 - 1e-9);
    EXPECT_LE(m, 1.2 * 200 + 1e-9);
  }
}

TEST(SyncError, Examples) {
  const auto tr = hand_trajectory({0.0, 1.0}, {{{1, 0}, {0, 1}, {1, 0}}, {{1, 0}, {1, 0}, {1, 0}}});
  const auto e = sync_error(tr);
  EXPECT_NEAR(e[0], std::sqrt(2.0), 1e-15);
  EXPECT_EQ(e[1], 0.0);
  EXPECT_THROW(sync_error(hand_trajectory({0.0}, {{{1, 0}}})), InputError);
}

TEST(SyncTime, FirstTimeAfterWhichTheSeriesStaysBelow) {
  const std::vector<double> t{0, 1, 2, 3, 4};
  EXPECT_EQ(sync_time(t, std::vector<double>{1, 1e-4, 1, 1e-4, 1e-5}, 1e-3), 3.0);
  EXPECT_EQ(sync_time(t, std::vector<double>{1e-4, 1e-4, 1e-4, 1e-4, 1e-5}, 1e-3), 0.0);
  EXPECT_FALSE(sync_time(t, std::vector<double>{1, 1, 1, 1, 1e-3}, 1e-3).has_value());
}

TEST(FitDecayRate, RecoversExponentialRate) {
  std::vector<double> t, y, flat;
  for (int k = 0; k <= 1000; ++k) {
    t.push_back(k * 1e-3);
    y.push_back(std::exp(-5.0 * t.back()));
    flat.push_back(2.0);
  }
  EXPECT_NEAR(fit_decay_rate(t, y), 5.0, 1e-6);
  EXPECT_NEAR(fit_decay_rate(t, flat), 0.0, 1e-12);
  EXPECT_THROW(fit_decay_rate(std::vector<double>{0, 1, 2}, std::vector<double>{1, 0.5, 0.25}), InputError);
}

TEST(Sharing, IdenticalBranchesShareEqually) {
  const auto s = two_branch(50.0);
  const auto tr = simulate(s);
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}};
  const auto r = sharing_ratio_report(tr, s.network, 0.04, pairs);
  EXPECT_TRUE(r.synchronized);
  EXPECT_NEAR(r.ratios[0], 1.0, 1e-9);
}

TEST(Sharing, HalfImpedanceCarriesTwiceTheCurrent) {
  const auto s = two_branch(50.0, 2.0);
  const auto tr = simulate(s);
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}};
  const auto r = sharing_ratio_report(tr, s.network, 0.04, pairs);
  EXPECT_TRUE(r.synchronized);
  EXPECT_NEAR(r.ratios[0], 2.0, 1e-6);
  EXPECT_NEAR(r.predicted[0], 2.0, 1e-12);
}

TEST(Sharing, CaseIIDeskMatchesImpedanceRatio) {
  const auto s = build_case(CaseId::II, 4, 2);
  const auto tr = simulate(s);
  const auto r = sharing_ratio_report(tr, s.network, 0.04, case_layout(4).pairs);
  EXPECT_TRUE(r.synchronized);
  for (double ratio : r.ratios) EXPECT_NEAR(ratio, kHighImpedanceScale / kLowImpedanceScale, 0.02 * 1.905);
  EXPECT_LT(r.error, 1e-3);
}

TEST(Amplitude, OpenLoopSettlesOnTheNominalCircle) {
  InverterParams p;
  p.kappa = 0.0;
  p.r_f = 0.1;
  p.L_f = 1e-3;
  Scenario s;
  s.params = {p};
  s.network = make_network(s.params, {10.0, 0.0}, p.omega0);
  s.t_end = 2.0;
  s.init.overrides = {{0, 0.3}};
  EXPECT_NEAR(amplitude_estimate(simulate(s), 0, 0.04), 1.0, 1e-6);
}

TEST(Amplitude, ZeroTrajectoryGivesZero) {
  std::vector<double> t;
  std::vector<std::vector<Phasor>> rows;
  for (int k = 0; k < 10; ++k) {
    t.push_back(k * 1e-3);
    rows.push_back({{0, 0}, {0, 0}});
  }
  EXPECT_EQ(amplitude_estimate(hand_trajectory(t, rows), 1, 5e-3), 0.0);
}

TEST(Amplitude, CaseIIDeskMatchesParticularRadius) {
  const auto s = build_case(CaseId::II, 4, 5);
  const auto tr = simulate(s);
  const double r_star = synchronized_steady(s.params[0], s.network).r_star;
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(amplitude_estimate(tr, i, 0.04), r_star, 1e-3);

  auto s2 = s;
  s2.init.seed = 6;
  EXPECT_NEAR(amplitude_estimate(simulate(s2), 0, 0.04), amplitude_estimate(tr, 0, 0.04), 1e-4);
}

TEST(Amplitude, TwoBranchSteadyStateMatchesLongRun) {
  auto s = two_branch(20.0);
  s.t_end = 2.0;
  const auto tr = simulate(s);
  const auto steady = synchronized_steady(s.params[0], s.network);
  EXPECT_NEAR(amplitude_estimate(tr, 0, 0.04), steady.r_star, 1e-6);
  EXPECT_NEAR(amplitude_estimate(tr, 1, 0.04), steady.r_star, 1e-6);
  const auto amps = current_amplitudes(tr, 0.04);
  EXPECT_NEAR(amps[0], steady.current_amplitudes[0], 1e-6 * steady.current_amplitudes[0]);
}

TEST(Metrics, FittedRateIsAtLeastTheCertifiedMargin) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto s = build_case(CaseId::I, 4, seed);
    s.t_end = 0.1;
    const auto tr = simulate(s);
    MetricsOptions mo;
    const auto m = compute_metrics(tr, s.network, mo);
    ASSERT_TRUE(m.fitted_rate.has_value());
    EXPECT_GE(*m.fitted_rate, 0.9 * certificate_margin(s.params[0]).margin_c);
    ASSERT_TRUE(m.sync_time.has_value());
  }
}
