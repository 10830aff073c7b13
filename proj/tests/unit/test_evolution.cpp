#include "common.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <mutex>

using namespace vvtest;

namespace {

// DCB growth run shared by several tests: h = 1/16, k = 5, straight search.
const EvolutionTrace& growth_trace() {
  static const EvolutionTrace tr = [] {
    auto ctx = dcb(1.0 / 16, 1.2);
    return run_discrete_evolution(edge_crack(0.3), TimeGrid::uniform(1.0, 5), 0.32,
                                  straight_search(), ctx);
  }();
  return tr;
}

bool is_prefix(const CrackComponent& a, const CrackComponent& b) {
  if (a.vertices.size() > b.vertices.size()) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i)
    if (a.vertices[i] != b.vertices[i]) return false;
  return true;
}

}  // namespace

TEST(TimeGrid, UniformAndRefined) {
  auto g = TimeGrid::uniform(2.0, 4);
  EXPECT_EQ(g.k(), 4);
  EXPECT_EQ(g.nodes, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  auto r = g.refined();
  EXPECT_EQ(r.k(), 8);
  EXPECT_DOUBLE_EQ(r.nodes[3], 0.75);
  EXPECT_NO_THROW(r.validate());
  EXPECT_THROW((TimeGrid{{0.0, 0.5, 0.5, 1.0}}.validate()), InvalidArgument);
  EXPECT_THROW((TimeGrid{{0.1, 0.5}}.validate()), InvalidArgument);
}

TEST(SearchConfig, LengthGridSpansMinToMax) {
  SearchConfig s;
  auto g = s.length_grid(0.1);
  ASSERT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g.front(), 0.05);
  EXPECT_NEAR(g.back(), 1.0, 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
}

TEST(IncrementalStep, ZeroLoadsChooseTheNullExtension) {
  auto ctx = dcb(1.0 / 16, 0.0);
  auto r = incremental_step(edge_crack(0.3), 0.0, 0.5, 0.1, SearchConfig{}, ctx);
  EXPECT_EQ(r.dl, std::vector<double>{0.0});
  EXPECT_EQ(r.objective, r.null_objective);
  EXPECT_EQ(r.state.crack.components[0].vertices, edge_crack(0.3).components[0].vertices);
  for (const auto& c : r.log)
    if (c.ok) EXPECT_GE(c.objective, r.objective);
}

TEST(IncrementalStep, LargerViscosityGrowsLess) {
  auto ctx = dcb(1.0 / 16, 1.2);
  std::vector<double> dl;
  for (double eps : {1.0, 10.0, 100.0})
    dl.push_back(incremental_step(edge_crack(0.3), 0.8, 1.0, eps, straight_search(), ctx).dl[0]);
  EXPECT_GT(dl[0], 0.0);
  EXPECT_GT(dl[0], dl[1]);
  EXPECT_GE(dl[1], dl[2]);
  EXPECT_LT(dl[2], 0.1 * dl[0]);
}

TEST(IncrementalStep, MatchesBruteForceScanOnStraightFamily) {
  auto ctx = dcb(1.0 / 16, 1.2);
  const double eps = 0.32, t0 = 0.8, t1 = 1.0, dt = t1 - t0;
  auto crack = edge_crack(0.3);
  auto r = incremental_step(crack, t0, t1, eps, straight_search(), ctx);
  // Scan every multiple of dl_min = h/2 up to the clearance limit.
  const double step = 0.5 / 16;
  double best = 1e300, best_dl = 0.0;
  for (int j = 0;; ++j) {
    double dl = j * step;
    CrackSet c = crack;
    if (dl > 0) c.components[0] = crack.components[0].extended(dl, 0.0, crack.eta);
    if (!check_admissible(c, ctx.domain.polygon, &crack).pass) break;
    double obj = evaluate_state(ctx, c, t1).energy.total + 0.5 * eps * dl * dl / dt;
    if (obj < best) best = obj, best_dl = dl;
  }
  ASSERT_GT(best_dl, 0.0);
  EXPECT_LE(std::abs(r.dl[0] - best_dl), step);
  // The chosen crack, re-evaluated like the scan, is at least as good.
  double chosen = evaluate_state(ctx, r.state.crack, t1).energy.total +
                  0.5 * eps * r.dl[0] * r.dl[0] / dt;
  EXPECT_LE(chosen, best + 1e-6 * std::abs(best));
}

TEST(Evolution, SingleStepWithoutLoadsKeepsTheSeed) {
  auto ctx = dcb(1.0 / 16, 0.0);
  auto tr = run_discrete_evolution(edge_crack(0.3), TimeGrid::uniform(1.0, 1), 0.1,
                                   SearchConfig{}, ctx);
  ASSERT_EQ(tr.states.size(), 2u);
  EXPECT_EQ(tr.status, "complete");
  for (const auto& s : tr.states) {
    EXPECT_EQ(s.crack.components[0].vertices, edge_crack(0.3).components[0].vertices);
    EXPECT_EQ(s.energy.elastic, 0.0);
  }
  auto rep = check_discrete_griffith(tr, 1.0, 1e-3);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.max_g3_residual, 0.0);
  auto bal = viscous_energy_balance(tr, ctx.loads);
  EXPECT_EQ(bal.max_abs_residual, 0.0);
  EXPECT_EQ(bal.relative_residual, 0.0);
}

TEST(Evolution, SubcriticalRampDoesNotGrow) {
  auto ctx = dcb(1.0 / 16, 0.35);
  auto tr = run_discrete_evolution(edge_crack(0.3), TimeGrid::uniform(1.0, 5), 0.32,
                                   straight_search(), ctx);
  for (const auto& s : tr.states) {
    EXPECT_EQ(s.lengths[0], 0.3);
    EXPECT_LT(s.G[0], ctx.material.kappa1);
  }
}

TEST(Evolution, GrowthIsIrreversibleAndDominatesNull) {
  const auto& tr = growth_trace();
  ASSERT_EQ(tr.status, "complete");
  ASSERT_EQ(tr.states.size(), 6u);
  EXPECT_GT(tr.states.back().lengths[0], 0.3 + 0.1);
  for (std::size_t i = 1; i < tr.states.size(); ++i) {
    EXPECT_GE(tr.states[i].lengths[0], tr.states[i - 1].lengths[0]);
    EXPECT_TRUE(is_prefix(tr.states[i - 1].crack.components[0], tr.states[i].crack.components[0]));
    EXPECT_LE(tr.steps[i - 1].objective, tr.steps[i - 1].null_objective);
    EXPECT_TRUE(std::isfinite(tr.states[i].energy.total));
  }
}

TEST(Evolution, GrowthSatisfiesDiscreteGriffith) {
  auto rep = check_discrete_griffith(growth_trace(), 1.0, 1e-3);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.max_g3_residual, 1e-3);
  bool grew = false;
  for (const auto& e : rep.entries) {
    EXPECT_TRUE(e.g1);
    grew = grew || e.dl > 0.0;
  }
  EXPECT_TRUE(grew);
}

TEST(Evolution, GriffithReportFlagsViolatingStepAndTip) {
  EvolutionTrace tr = growth_trace();
  // Pretend the seed was supercritical at the second state without growing.
  tr.states[1].G[0] = 5.0;
  tr.states[1].lengths = tr.states[0].lengths;
  tr.steps[0].dl = {0.0};
  auto rep = check_discrete_griffith(tr, 1.0, 1e-3);
  EXPECT_FALSE(rep.pass);
  ASSERT_FALSE(rep.failures.empty());
  EXPECT_EQ(rep.failures[0].step, 1u);
  EXPECT_EQ(rep.failures[0].tip, 0u);
  EXPECT_FALSE(rep.failures[0].g2);
}

TEST(Evolution, IsDeterministic) {
  auto ctx = dcb(1.0 / 16, 1.2);
  auto again = run_discrete_evolution(edge_crack(0.3), TimeGrid::uniform(1.0, 5), 0.32,
                                      straight_search(), ctx);
  const auto& tr = growth_trace();
  ASSERT_EQ(again.states.size(), tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    EXPECT_EQ(again.states[i].lengths, tr.states[i].lengths);
    EXPECT_EQ(again.states[i].energy.total, tr.states[i].energy.total);
    EXPECT_EQ(again.states[i].crack.components[0].vertices,
              tr.states[i].crack.components[0].vertices);
  }
}

TEST(Evolution, ParallelSearchMatchesSerial) {
  auto ctx = dcb(1.0 / 16, 1.2);
  auto s = straight_search();
  s.workers = 2;
  auto par = incremental_step(edge_crack(0.3), 0.8, 1.0, 0.32, s, ctx);
  auto ser = incremental_step(edge_crack(0.3), 0.8, 1.0, 0.32, straight_search(), ctx);
  EXPECT_EQ(par.dl, ser.dl);
  EXPECT_EQ(par.objective, ser.objective);
}

TEST(Evolution, StepRefinementKeepsFinalLength) {
  auto ctx = dcb(1.0 / 16, 1.2);
  auto fine = run_discrete_evolution(edge_crack(0.3), TimeGrid::uniform(1.0, 10), 0.32,
                                     straight_search(), ctx);
  double a = growth_trace().states.back().lengths[0], b = fine.states.back().lengths[0];
  EXPECT_LE(std::abs(a - b), 0.1 * (a - 0.3));
}

TEST(Evolution, InterpolantsArePiecewise) {
  const auto& tr = growth_trace();
  double l1 = tr.states[1].lengths[0], l2 = tr.states[2].lengths[0];
  EXPECT_NEAR(tr.length_at(0, 0.3), 0.5 * (l1 + l2), 1e-14);
  EXPECT_EQ(&tr.crack_at(0.3), &tr.states[1].crack);
  EXPECT_EQ(&tr.crack_at(1.0), &tr.states[5].crack);
}

TEST(Evolution, EnergyBalanceOnGrowthRun) {
  auto bal = viscous_energy_balance(growth_trace(), dcb(1.0 / 16, 1.2).loads);
  EXPECT_EQ(bal.residual.front(), 0.0);
  EXPECT_GT(bal.work_scale, 0.0);
  EXPECT_LE(bal.relative_residual, 0.05);
  EXPECT_GE(bal.min_bound_margin, -1e-6 * bal.work_scale);
}

TEST(Evolution, TwoTipsGrowSymmetrically) {
  auto ctx = tension_benchmark(1.0 / 16);
  ctx.loads.w_amp = TimeSeries::ramp(0.0, 0.6, 1.0);
  CrackSet c;
  c.eta = 0.05;
  c.components.push_back(
      CrackComponent::from_vertices({{0, 0.5}, {0.2, 0.5}}, OriginKind::BoundaryAnchored));
  c.components.push_back(
      CrackComponent::from_vertices({{1, 0.5}, {0.8, 0.5}}, OriginKind::BoundaryAnchored));
  auto r = incremental_step(c, 0.0, 1.0, 10.0, straight_search(), ctx);
  ASSERT_FALSE(r.clearance_stop) << r.note;
  ASSERT_EQ(r.dl.size(), 2u);
  EXPECT_GT(r.dl[0], 0.0);
  EXPECT_NEAR(r.dl[0], r.dl[1], 0.5 / 16);
}
