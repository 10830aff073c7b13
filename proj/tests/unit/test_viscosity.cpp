#include "common.hpp"

#include <gtest/gtest.h>

#include <mutex>

using namespace vvtest;

namespace {

// Single-tip trace with prescribed times, lengths, rates and toughness; the
// energies are left at zero.
EvolutionTrace synthetic(const std::vector<double>& t, const std::vector<double>& l,
                         const std::vector<double>& G, double kappa = 1.0, double eps = 0.1) {
  EvolutionTrace tr;
  tr.epsilon = eps;
  tr.grid.nodes = t;
  for (std::size_t i = 0; i < t.size(); ++i) {
    StateRecord s;
    s.t = t[i];
    s.crack = edge_crack(l[i]);
    s.lengths = {l[i]};
    s.tips = {Vec2(l[i], 0.5)};
    s.G = {G[i]};
    s.kappa_tip = {kappa};
    tr.states.push_back(s);
    if (i > 0) {
      StepSummary st;
      st.dl = {l[i] - l[i - 1]};
      st.curvature = {0.0};
      tr.steps.push_back(st);
    }
  }
  return tr;
}

LoadTrajectory no_loads() {
  LoadTrajectory L;
  L.w_profile.x = Expression(0.0);
  L.w_profile.y = Expression(0.0);
  return L;
}

}  // namespace

TEST(Ladder, HalvesFromEpsilonZero) {
  EXPECT_EQ(epsilon_ladder(0.32, 3), (std::vector<double>{0.32, 0.16, 0.08}));
  EXPECT_EQ(epsilon_ladder(1.0, 1), std::vector<double>{1.0});
}

TEST(Reparametrize, NoGrowthIsTheIdentity) {
  auto tr = synthetic({0, 0.25, 0.5, 1.0}, {0.3, 0.3, 0.3, 0.3}, {0.2, 0.3, 0.4, 0.5});
  auto p = reparametrize(tr);
  EXPECT_DOUBLE_EQ(p.S, 1.0);
  ASSERT_EQ(p.samples.size(), 4u);
  for (const auto& s : p.samples) {
    EXPECT_DOUBLE_EQ(s.sigma, s.t);
    EXPECT_EQ(s.tprime, 1.0);
    EXPECT_EQ(s.lprime[0], 0.0);
    EXPECT_EQ(s.lengths[0], 0.3);
  }
  auto rep = parametrized_griffith_check(p, no_loads(), 1.0, 1e-3);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.plateau_length, 0.0);
  EXPECT_EQ(rep.balance_residual.front(), 0.0);
}

TEST(Reparametrize, UnitSlopeHalvesBothDerivatives) {
  auto tr = synthetic({0, 0.5, 1.0}, {0.3, 0.8, 1.3}, {1, 1, 1});
  auto p = reparametrize(tr);
  EXPECT_DOUBLE_EQ(p.S, 2.0);
  for (const auto& pc : p.pieces) {
    EXPECT_DOUBLE_EQ(pc.tprime, 0.5);
    EXPECT_DOUBLE_EQ(pc.lprime[0], 0.5);
  }
  EXPECT_DOUBLE_EQ(p.samples[1].sigma, 1.0);
  EXPECT_DOUBLE_EQ(p.samples[1].t, 0.5);
}

TEST(Reparametrize, IdentityHoldsOnIrregularTraces) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t{0.0}, l{0.3}, G{0.5};
    for (int i = 0; i < 12; ++i) {
      t.push_back(t.back() + 0.01 + U(rng));
      l.push_back(l.back() + (U(rng) < 0.5 ? 0.0 : U(rng) * 1e3 * (U(rng) < 0.2)));
      G.push_back(1.0);
    }
    auto p = reparametrize(synthetic(t, l, G));
    auto rep = parametrized_griffith_check(p, no_loads(), 1.0, 1e-3);
    EXPECT_LE(rep.max_identity_error, 1e-12);
  }
}

TEST(Reparametrize, JumpBecomesAPlateauOfItsMass) {
  // Steady growth, then a jump of 0.4 in the step ending at t = 0.6.
  std::vector<double> t{0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> l{0.3, 0.31, 0.32, 0.72, 0.73, 0.74};
  std::vector<double> G{1, 1, 1, 1, 1, 1};
  auto tr = synthetic(t, l, G);
  auto jd = detect_jumps(tr, 0.005);
  EXPECT_NEAR(jd.threshold, 5 * (0.01 + 0.005), 1e-12);
  EXPECT_EQ(jd.steps, (std::vector<char>{0, 0, 0, 1, 0, 0}));
  auto w = jump_windows(tr, jd.steps);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_DOUBLE_EQ(w[0].t_before, 0.4);
  EXPECT_DOUBLE_EQ(w[0].t_jump, 0.6);
  EXPECT_NEAR(w[0].mass[0], 0.4, 1e-12);

  auto p = reparametrize(tr, jd.steps);
  auto rep = parametrized_griffith_check(p, no_loads(), 1.0, 1e-3);
  EXPECT_NEAR(rep.plateau_length, 0.4, 1e-12);
  EXPECT_LE(rep.max_identity_error, 1e-12);
  int plateaus = 0;
  for (const auto& pc : p.pieces)
    if (pc.plateau) {
      ++plateaus;
      EXPECT_EQ(pc.tprime, 0.0);
      EXPECT_EQ(pc.lprime[0], 1.0);
      EXPECT_EQ(pc.t0, 0.6);
      EXPECT_EQ(pc.t1, 0.6);
    }
  EXPECT_EQ(plateaus, 1);
  EXPECT_NEAR(p.S, 1.0 + 0.44, 1e-12);
}

TEST(ParamGriffith, ClauseLogic) {
  // No growth, G above toughness: only (pG2) can fire.
  auto p = reparametrize(synthetic({0, 0.5, 1}, {0.3, 0.3, 0.3}, {0.5, 1.5, 0.5}));
  auto rep = parametrized_griffith_check(p, no_loads(), 1.0, 1e-3);
  EXPECT_FALSE(rep.pass);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].clause, "pG2");
  EXPECT_EQ(rep.violations[0].sample, 1u);

  // Growth with G off toughness: (pG3).
  p = reparametrize(synthetic({0, 0.5, 1}, {0.3, 0.4, 0.5}, {0.9, 0.9, 0.9}));
  rep = parametrized_griffith_check(p, no_loads(), 1.0, 1e-3);
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.violations[0].clause, "pG3");

  // A plateau whose rate is below toughness: (pG4).
  auto tr = synthetic({0, 0.5, 1}, {0.3, 0.3, 0.8}, {0.2, 0.2, 0.2});
  p = reparametrize(tr, {0, 0, 1});
  for (auto& s : p.samples) s.G = {0.5};
  rep = parametrized_griffith_check(p, no_loads(), 1.0, 1e-3);
  bool pg4 = false;
  for (const auto& v : rep.violations) pg4 = pg4 || v.clause == "pG4";
  EXPECT_TRUE(pg4);
  EXPECT_NEAR(rep.plateau_min_margin, -0.5, 1e-12);
}

TEST(ViscousGriffith, NoGrowthFamilyHoldsExactly) {
  ViscousFamily fam;
  for (double e : epsilon_ladder(0.4, 3)) {
    fam.epsilons.push_back(e);
    fam.traces.push_back(synthetic({0, 0.5, 1}, {0.3, 0.3, 0.3}, {0.1, 0.2, 0.3}, 1.0, e));
  }
  auto rep = viscous_griffith_check(fam, 1.0, 1e-3);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.norm_trend_ok);
  for (const auto& m : rep.members) EXPECT_EQ(m.max_g3_residual, 0.0);
  for (double n : rep.dissipation_norm) EXPECT_EQ(n, 0.0);
  auto lim = extract_limit(fam, 0.05, 0.01, 1e-3, std::sqrt(2.0));
  EXPECT_TRUE(lim.converged);
  EXPECT_EQ(lim.status, "converged");
  for (double c : lim.certificate) EXPECT_EQ(c, 0.0);
  EXPECT_TRUE(lim.jumps.empty());
}

TEST(ViscousGriffith, DivergentFamilyHasNoCertificate) {
  ViscousFamily fam;
  double end[3] = {0.35, 0.45, 0.6};
  for (int j = 0; j < 3; ++j) {
    fam.epsilons.push_back(0.4 / (1 << j));
    std::vector<double> t, l;
    for (int i = 0; i <= 10; ++i) {
      t.push_back(0.1 * i);
      l.push_back(0.3 + (end[j] - 0.3) * 0.1 * i);
    }
    fam.traces.push_back(synthetic(t, l, std::vector<double>(11, 1.0), 1.0, fam.epsilons[j]));
  }
  auto lim = extract_limit(fam, 0.05, 0.001, 1e-3, std::sqrt(2.0));
  EXPECT_FALSE(lim.converged);
  EXPECT_EQ(lim.status, "no Cauchy certificate");
  EXPECT_NEAR(lim.certificate.back(), 0.15, 1e-3);
  fam.traces.pop_back();
  EXPECT_THROW(extract_limit(fam, 0.05, 0.001, 1e-3, 1.0), InvalidArgument);
}

TEST(ViscousFamily, SubcriticalFamilyKeepsTheSeed) {
  auto ctx = dcb(1.0 / 16, 0.35);
  auto grid = TimeGrid::uniform(1.0, 4);
  auto eps = epsilon_ladder(0.32, 3);
  auto fam = run_viscous_family(edge_crack(0.3), grid, eps, straight_search(), ctx, 2);
  ASSERT_EQ(fam.traces.size(), 3u);
  EXPECT_EQ(fam.epsilons, eps);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(fam.traces[j].epsilon, eps[j]);
    for (const auto& s : fam.traces[j].states) EXPECT_EQ(s.lengths[0], 0.3);
  }
  auto lim = extract_limit(fam, 0.05, 1.0 / 32, 1e-3, std::sqrt(2.0));
  EXPECT_TRUE(lim.converged);
  for (double c : lim.certificate) EXPECT_EQ(c, 0.0);
  auto rep = viscous_griffith_check(fam, 1.0, 1e-3);
  EXPECT_TRUE(rep.pass);
}

TEST(ViscousFamily, MemberCallbacksSeeEveryStep) {
  auto ctx = dcb(1.0 / 16, 0.35);
  std::vector<int> seen(2, 0);
  std::mutex mu;
  run_viscous_family(edge_crack(0.3), TimeGrid::uniform(1.0, 3), {0.2, 0.1}, straight_search(),
                     ctx, 2, [&](std::size_t j, std::size_t, const IncrementalStepResult&) {
                       std::lock_guard<std::mutex> lock(mu);
                       ++seen[j];
                     });
  EXPECT_EQ(seen, (std::vector<int>{4, 4}));
}

TEST(Plateaus, ResolvedStatesSitAtTheJumpTime) {
  auto ctx = dcb(1.0 / 16, 1.2);
  std::vector<double> t{0, 0.5, 1.0};
  auto tr = run_discrete_evolution(edge_crack(0.3), TimeGrid{t}, 0.32, straight_search(), ctx);
  ASSERT_GT(tr.states[2].lengths[0], tr.states[1].lengths[0]);
  auto p = reparametrize(tr, {0, 0, 1});
  ASSERT_FALSE(p.samples[2].resolved);
  resolve_plateaus(p, ctx, 2);
  int on_plateau = 0;
  for (const auto& s : p.samples) {
    EXPECT_TRUE(s.resolved);
    if (s.plateau) {
      ++on_plateau;
      EXPECT_EQ(s.t, 1.0);
      EXPECT_TRUE(std::isfinite(s.G[0]));
    }
  }
  EXPECT_EQ(on_plateau, 4);  // start, two interior states and the closing end state
  for (std::size_t k = 1; k < p.samples.size(); ++k) {
    EXPECT_GE(p.samples[k].sigma, p.samples[k - 1].sigma);
    EXPECT_GE(p.samples[k].lengths[0], p.samples[k - 1].lengths[0] - 1e-12);
  }
}
