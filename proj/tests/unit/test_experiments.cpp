#include <gtest/gtest.h>

#include "oracles.hpp"
#include "slowdiff/experiments.hpp"

using namespace slowdiff;

namespace {

/// Coarse desk-scale template: K = |x|^q/q - |x|/2, Barenblatt data.
RunConfig coarse(double q, double m, double mass) {
  RunConfig c;
  c.kernel_terms = {{1.0, q}, {-0.5, 1.0}};
  c.unsafe_params = true;
  c.m = m;
  c.h = 0.02;
  c.truncate = true;
  c.t_final = 60.0;
  c.barenblatt = {2.0, 0.1, mass};
  return c;
}

}  // namespace

TEST(ClassifyPhase, UnitHeightPatchIsSolid) {
  const auto e = init_patch(-0.5, 0.5, 1.0, 1000);
  const auto r = classify_phase(e, Mollifier(epsilon_from_h(1e-3), 1));
  EXPECT_EQ(r.phase, Phase::solid);
  EXPECT_NEAR(r.plateau_fraction, 1.0, 0.05);
  EXPECT_LE(r.plateau_fraction, 1.0);
}

TEST(ClassifyPhase, LowProfileIsLiquid) {
  const auto e = init_patch(-1.0, 1.0, 1.4, 400);  // height 0.7
  const auto r = classify_phase(e, Mollifier(epsilon_from_h(0.005), 1));
  EXPECT_EQ(r.phase, Phase::liquid);
  EXPECT_EQ(r.plateau_fraction, 0.0);
  EXPECT_NEAR(r.sup_density, 0.7, 0.01);
}

TEST(ClassifyPhase, PartialPlateauIsIntermediate) {
  // Height 1 on [-0.25, 0.25] plus height 0.5 shoulders on [-0.75, 0.75].
  std::vector<Vec<1>> p;
  for (int i = 0; i < 500; ++i) p.push_back({-0.25 + (i + 0.5) * 1e-3});
  for (int i = 0; i < 250; ++i) {
    p.push_back({-0.75 + (i + 0.5) * 2e-3});
    p.push_back({0.25 + (i + 0.5) * 2e-3});
  }
  std::sort(p.begin(), p.end());
  const Ensemble1D e(p, std::vector<double>(p.size(), 1e-3));
  const auto r = classify_phase(e, Mollifier(2e-3, 1));
  EXPECT_EQ(r.phase, Phase::intermediate);
  EXPECT_NEAR(r.plateau_fraction, 0.5, 0.05);
}

TEST(ClassifyPhase, SteadyStateAtQ14IsIntermediate) {
  RunConfig c = coarse(1.4, 200.0, 0.39);
  c.h = 0.01;
  const auto snap = run_to_steady(c);
  const auto r = classify_phase(snap.ensemble, c.mollifier());
  EXPECT_EQ(r.phase, Phase::intermediate) << r.plateau_fraction;
}

TEST(CriticalMass, RejectsBracketsThatDoNotStraddle) {
  try {
    critical_mass(2.0, 1.0, 200.0, coarse(2.0, 200.0, 1.0), {1.3, 1.6});
    FAIL() << "expected a bracket error";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), "bracket");
  }
  EXPECT_THROW(critical_mass(2.0, 1.0, 200.0, coarse(2.0, 200.0, 1.0), {1.0, 0.5}), std::invalid_argument);
}

TEST(CriticalMass, CoarseBisectionBracketsTheTransition) {
  const auto r = critical_mass(2.0, 1.0, 200.0, coarse(2.0, 200.0, 1.0), {0.5, 1.5}, 0.25);
  EXPECT_EQ(r.runs, 2 + 2);
  EXPECT_LE(r.bracket.second - r.bracket.first, 0.25);
  EXPECT_GE(r.critical_mass, r.bracket.first);
  EXPECT_LE(r.critical_mass, r.bracket.second);
  ASSERT_EQ(r.history.size(), 4u);
  EXPECT_NE(r.history[0].report.phase, Phase::solid);
  EXPECT_EQ(r.history[1].report.phase, Phase::solid);
}

TEST(RunToSteady, FailsWhenTheHorizonIsTooShort) {
  RunConfig c = coarse(2.0, 50.0, 1.0);
  c.t_final = 0.01;
  try {
    run_to_steady(c);
    FAIL() << "expected not_steady";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), "not_steady");
  }
}

TEST(MSweep, QuadraticKernelMatchesClosedForm) {
  RunConfig c;
  c.kernel_terms = {KernelTerm::from_raw(2.0, 2.0)};
  c.m = 2.0;
  c.h = 0.02;
  c.barenblatt = {2.0, 0.15, 1.0};
  const auto rows = m_sweep(c, {2.0, 4.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[0].support_diam, rows[1].support_diam);
  for (const auto& r : rows) {
    const auto [diam, sup] = oracle::quadratic_steady_state(r.m, 1.0);
    EXPECT_NEAR(r.support_diam, diam, 0.1 * diam) << r.m;
    EXPECT_NEAR(r.sup_density, sup, 0.05 * sup) << r.m;
    EXPECT_GE(r.e_m, r.e_interaction);
  }
  EXPECT_THROW(m_sweep(c, {1.0}), std::invalid_argument);
}

TEST(InitialDataInvariance, SubcriticalCoarseRun) {
  const auto r = initial_data_invariance(2.0, 1.0, 50.0, 0.9, coarse(2.0, 50.0, 0.9));
  EXPECT_TRUE(r.agree) << r.w2;
  EXPECT_EQ(r.barenblatt.phase, r.patch.phase);
}

TEST(PressureOffPlateau, VanishesForLowProfilesAtLargeM) {
  const auto e = init_patch(-1.0, 1.0, 1.6, 400);  // height 0.8
  const Mollifier moll(epsilon_from_h(0.005), 1);
  EXPECT_LE(pressure_off_plateau(e, moll, 200.0), std::pow(0.81, 200.0));
  EXPECT_GT(pressure_off_plateau(e, moll, 2.0), 0.6);
}
