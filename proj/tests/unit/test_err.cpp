#include "common.hpp"

#include <gtest/gtest.h>

using namespace vvtest;

namespace {

struct Solved {
  EvolutionContext ctx;
  CrackSet crack;
  CrackedMesh mesh;
  DisplacementField u;
};

Solved solve(EvolutionContext ctx, CrackSet crack, double t = 1.0) {
  Solved s{std::move(ctx), std::move(crack), {}, {}};
  s.mesh = build_mesh(s.ctx.domain, s.crack, s.ctx.mesh);
  s.u = solve_equilibrium(s.mesh, s.ctx.material, s.ctx.loads, t);
  return s;
}

double G_default(const Solved& s, std::size_t m = 0, double t = 1.0) {
  return err_vector(s.u, s.ctx.material, s.ctx.loads, t, s.crack, s.ctx.domain.polygon)[m].G;
}

}  // namespace

TEST(Cutoff, ProfileIsC1Ramp) {
  EXPECT_EQ(cutoff(0.0, 0.1, 0.2), 1.0);
  EXPECT_EQ(cutoff(0.1, 0.1, 0.2), 1.0);
  EXPECT_EQ(cutoff(0.2, 0.1, 0.2), 0.0);
  EXPECT_EQ(cutoff(0.3, 0.1, 0.2), 0.0);
  EXPECT_NEAR(cutoff(0.15, 0.1, 0.2), 0.5, 1e-14);
  EXPECT_NEAR(cutoff_derivative(0.1, 0.1, 0.2), 0.0, 1e-14);
  EXPECT_NEAR(cutoff_derivative(0.2, 0.1, 0.2), 0.0, 1e-14);
  double d = 0.137, e = 1e-6;
  EXPECT_NEAR(cutoff_derivative(d, 0.1, 0.2),
              (cutoff(d + e, 0.1, 0.2) - cutoff(d - e, 0.1, 0.2)) / (2 * e), 1e-7);
}

TEST(VelocityField, PlateauAndSupport) {
  auto ctx = tension_benchmark(1.0 / 32);
  auto crack = straight_crack({0, 0.5}, {0.5, 0.5}, 0.15);
  auto mesh = build_mesh(ctx.domain, crack, ctx.mesh);
  auto v = build_velocity_field(mesh, crack, 0, 0.2, ctx.domain.polygon);
  Vec2 tip(0.5, 0.5);
  double div_integral = 0.0;
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
    double d = (mesh.nodes[n] - tip).norm();
    if (d <= 0.1) EXPECT_NEAR((v.nodal[n] - Vec2(1, 0)).norm(), 0.0, 1e-14);
    if (d >= 0.2) EXPECT_EQ(v.nodal[n].norm(), 0.0);
    EXPECT_LE(v.nodal[n].norm(), 1.0 + 1e-14);
  }
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    div_integral += v.gradient(mesh, t).trace() * mesh.triangle_area(t);
  EXPECT_NEAR(div_integral, 0.0, 1e-12);
}

TEST(VelocityField, DiskReachingTheBoundaryIsInfeasible) {
  auto s = solve(tension_benchmark(1.0 / 16), edge_crack(0.3));
  EXPECT_THROW(build_velocity_field(s.mesh, s.crack, 0, 0.35, s.ctx.domain.polygon),
               InfeasibleRadiusError);
  EXPECT_THROW(build_velocity_field(s.mesh, s.crack, 0, 1e-4, s.ctx.domain.polygon),
               InfeasibleRadiusError);
  double r = default_radius(s.mesh, s.crack, 0, s.ctx.domain.polygon);
  EXPECT_NEAR(r, 0.9 * 2 * s.crack.eta, 1e-12);
}

TEST(Err, ZeroLoadsGiveZeroRate) {
  auto ctx = tension_benchmark(1.0 / 16);
  ctx.loads.w_amp = TimeSeries::constant(0.0, 1.0);
  auto s = solve(ctx, edge_crack(0.3));
  auto e = err_vector(s.u, ctx.material, ctx.loads, 1.0, s.crack, ctx.domain.polygon);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].G, 0.0);
  auto sens = extension_independence_check(s.u, ctx.material, ctx.loads, 1.0, s.crack, 0,
                                           {0.05, 0.1}, ctx.domain.polygon);
  EXPECT_EQ(sens.spread, 0.0);
}

TEST(Err, ConstantModuliLeaveOnlyEshelbyTerms) {
  auto s = solve(tension_benchmark(1.0 / 32), edge_crack(0.3));
  auto e = err_vector(s.u, s.ctx.material, s.ctx.loads, 1.0, s.crack, s.ctx.domain.polygon)[0];
  EXPECT_EQ(e.material_term, 0.0);
  EXPECT_EQ(e.force_term, 0.0);
  EXPECT_NEAR(e.G, e.convection_term + e.dilation_term, 1e-12 * std::abs(e.G));
  EXPECT_GT(e.G, 0.0);
  EXPECT_TRUE(e.feasible);
}

TEST(Err, TermsSumToRateWithVariableModuliAndBodyForce) {
  auto ctx = tension_benchmark(1.0 / 32);
  ctx.material.lambda = ScalarField(Expression::parse("1 + 0.5*x"));
  ctx.material.mu = ScalarField(Expression::parse("1 + 0.3*y"));
  ctx.loads.f_profile.x = Expression(0.0);
  ctx.loads.f_profile.y = Expression(0.5);
  ctx.loads.f_amp = TimeSeries::constant(1.0, 1.0);
  auto s = solve(ctx, edge_crack(0.3));
  auto e = err_vector(s.u, ctx.material, ctx.loads, 1.0, s.crack, ctx.domain.polygon)[0];
  EXPECT_NE(e.material_term, 0.0);
  EXPECT_NE(e.force_term, 0.0);
  EXPECT_NEAR(e.G, e.material_term + e.convection_term + e.dilation_term + e.force_term,
              1e-12 * std::abs(e.G));
  // Analytic and finite-difference moduli gradients agree to first order.
  auto v = build_velocity_field(s.mesh, s.crack, 0, e.radius, ctx.domain.polygon);
  auto fd = energy_release_rate(s.u, ctx.material, ctx.loads, 1.0, s.crack, 0, v, true);
  EXPECT_NEAR(fd.G, e.G, 1e-3 * std::abs(e.G));
}

TEST(Err, SingleTipVectorMatchesDirectCall) {
  auto s = solve(tension_benchmark(1.0 / 32), edge_crack(0.3));
  double r = default_radius(s.mesh, s.crack, 0, s.ctx.domain.polygon);
  auto v = build_velocity_field(s.mesh, s.crack, 0, r, s.ctx.domain.polygon);
  auto direct = energy_release_rate(s.u, s.ctx.material, s.ctx.loads, 1.0, s.crack, 0, v);
  EXPECT_EQ(direct.G, G_default(s));
}

TEST(Err, AgreesWithFiniteDifferenceOracle) {
  auto ctx = tension_benchmark(1.0 / 32);
  auto s = solve(ctx, edge_crack(0.3));
  double G = G_default(s);
  auto fd = finite_difference_err(ctx.domain, ctx.material, ctx.loads, 1.0, s.crack, 0, ctx.mesh,
                                  1e-3);
  EXPECT_LE(std::abs(G - fd.G_fd) / std::max(G, ctx.material.kappa1), 0.02);
  EXPECT_NEAR(fd.G_fd, (fd.E_minus - fd.E_plus) / (2 * fd.delta), 1e-12 * std::abs(fd.G_fd));
}

TEST(Err, DoublingTheCutoffRadiusChangesLittle) {
  auto s = solve(tension_benchmark(1.0 / 32), edge_crack(0.3));
  double r = default_radius(s.mesh, s.crack, 0, s.ctx.domain.polygon);
  auto sens = extension_independence_check(s.u, s.ctx.material, s.ctx.loads, 1.0, s.crack, 0,
                                           {r, 2 * r}, s.ctx.domain.polygon);
  EXPECT_LT(sens.radius_spread, 0.01);
  EXPECT_LT(sens.tilt_spread, 0.01);
}

TEST(Err, RadiusSpreadShrinksUnderRefinement) {
  std::vector<double> spread;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    // Radii well above the element floor at every level.
    auto s = solve(tension_benchmark(h), edge_crack(0.5));
    auto sens = extension_independence_check(s.u, s.ctx.material, s.ctx.loads, 1.0, s.crack, 0,
                                             {0.2, 0.4}, s.ctx.domain.polygon);
    spread.push_back(sens.radius_spread);
  }
  EXPECT_LT(spread[1], spread[0]);
  EXPECT_LT(spread[2], spread[1]);
}

TEST(Err, SymmetricTipsHaveEqualRates) {
  CrackSet c;
  c.eta = 0.05;
  c.components.push_back(
      CrackComponent::from_vertices({{0, 0.5}, {0.3, 0.5}}, OriginKind::BoundaryAnchored));
  c.components.push_back(
      CrackComponent::from_vertices({{1, 0.5}, {0.7, 0.5}}, OriginKind::BoundaryAnchored));
  auto s = solve(tension_benchmark(1.0 / 32), c);
  auto e = err_vector(s.u, s.ctx.material, s.ctx.loads, 1.0, s.crack, s.ctx.domain.polygon);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_LE(std::abs(e[0].G - e[1].G), 0.01 * e[0].G);
}

TEST(Err, QuadraticInTheLoadAmplitude) {
  auto ctx = tension_benchmark(1.0 / 32);
  auto s1 = solve(ctx, edge_crack(0.3), 1.0);
  auto s2 = solve(ctx, edge_crack(0.3), 0.5);
  double G1 = G_default(s1, 0, 1.0), G2 = G_default(s2, 0, 0.5);
  EXPECT_NEAR(G2 / G1, 0.25, 0.25 * 1e-3);
}

TEST(Err, TipWithoutFeasibleRadiusIsFlagged) {
  auto ctx = tension_benchmark(1.0 / 16);
  // Tip closer to the right edge than four local element sizes.
  CrackSet c = straight_crack({0, 0.5}, {0.99, 0.5}, 0.002);
  auto s = solve(ctx, c);
  auto e = err_vector(s.u, ctx.material, ctx.loads, 1.0, c, ctx.domain.polygon);
  EXPECT_FALSE(e[0].feasible);
  EXPECT_TRUE(std::isnan(e[0].G));
  EXPECT_FALSE(e[0].note.empty());
}

TEST(Err, ContinuousInTheBodyForce) {
  auto base = tension_benchmark(1.0 / 32);
  double G0 = G_default(solve(base, edge_crack(0.3)));
  std::vector<double> dG;
  for (double d : {1e-3, 1e-2, 1e-1}) {
    auto ctx = base;
    ctx.loads.f_profile.x = Expression(0.0);
    ctx.loads.f_profile.y = Expression(d);
    ctx.loads.f_amp = TimeSeries::constant(1.0, 1.0);
    dG.push_back(std::abs(G_default(solve(ctx, edge_crack(0.3))) - G0));
  }
  EXPECT_LT(dG[0], dG[1]);
  EXPECT_LT(dG[1], dG[2]);
  EXPECT_LT(dG[2] / 1e-1, 10.0);
}
