#include "common.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace vvtest;

namespace {

DomainSpec clamped_square() {
  return unit_square({EdgeKind::Dirichlet, EdgeKind::Dirichlet, EdgeKind::Dirichlet,
                      EdgeKind::Dirichlet});
}

// Bottom held, unit vertical traction on the top edge, sides free.
LoadTrajectory top_traction() {
  LoadTrajectory L;
  L.w_profile.x = Expression(0.0);
  L.w_profile.y = Expression(0.0);
  L.g_profile.x = Expression(0.0);
  L.g_profile.y = Expression(1.0);
  L.g_amp = TimeSeries::constant(1.0, 1.0);
  return L;
}

DomainSpec traction_square() {
  return unit_square({EdgeKind::Dirichlet, EdgeKind::Free, EdgeKind::Traction, EdgeKind::Free});
}

double min_signed_area(const CrackedMesh& mesh) {
  double a = 1e300;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) a = std::min(a, mesh.triangle_area(t));
  return a;
}

}  // namespace

TEST(Mesh, UncrackedSquareHasNoDuplicates) {
  CrackSet none;
  auto mesh = build_mesh(clamped_square(), none, 0.1, 8.0);
  EXPECT_TRUE(mesh.duplicates.empty());
  EXPECT_TRUE(mesh.crack_edges.empty());
  EXPECT_GT(min_signed_area(mesh), 0.0);
  double area = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) area += mesh.triangle_area(t);
  EXPECT_NEAR(area, 1.0, 1e-12);
}

TEST(Mesh, CrackFacesAreDuplicatedExceptAtTheTip) {
  auto crack = straight_crack({0, 0.5}, {0.5, 0.5});
  auto mesh = build_mesh(clamped_square(), crack, 0.1, 8.0);
  ASSERT_EQ(mesh.tip_nodes.size(), 1u);
  int tip = mesh.tip_nodes[0];
  EXPECT_NEAR((mesh.nodes[tip] - Vec2(0.5, 0.5)).norm(), 0.0, 1e-14);
  EXPECT_FALSE(mesh.duplicates.empty());
  for (auto [a, b] : mesh.duplicates) {
    EXPECT_EQ(mesh.nodes[a], mesh.nodes[b]);
    EXPECT_NE(a, tip);
    EXPECT_NE(b, tip);
    EXPECT_NEAR(mesh.nodes[a].y(), 0.5, 1e-14);
  }
  // Every crack vertex except the tip carries two nodes.
  std::set<int> on_crack;
  for (const auto& e : mesh.crack_edges) {
    on_crack.insert(e.a);
    on_crack.insert(e.b);
  }
  int at_tip = 0;
  for (int n : on_crack) at_tip += (mesh.nodes[n] - Vec2(0.5, 0.5)).norm() < 1e-14;
  EXPECT_EQ(at_tip, 1);
  EXPECT_GT(min_signed_area(mesh), 0.0);
  EXPECT_LE(mesh.local_size(tip), 0.1 / 8.0 * 1.5);
}

TEST(Mesh, HalvingHQuadruplesNodeCount) {
  auto crack = edge_crack(0.3);
  auto a = build_mesh(clamped_square(), crack, 0.1, 1.0);
  auto b = build_mesh(clamped_square(), crack, 0.05, 1.0);
  double ratio = double(b.num_nodes()) / double(a.num_nodes());
  EXPECT_GT(ratio, 4.0 * 0.7);
  EXPECT_LT(ratio, 4.0 * 1.3);
}

TEST(Mesh, CrackVertexOnPolygonCornerIsAMeshingError) {
  CrackSet c = straight_crack({0, 0}, {0.3, 0.3});
  EXPECT_THROW(build_mesh(clamped_square(), c, 0.1, 8.0), MeshingError);
}

TEST(Elasticity, ZeroLoadsGiveZeroField) {
  auto mesh = build_mesh(clamped_square(), edge_crack(0.3), 0.1, 8.0);
  MaterialModel mat;
  LoadTrajectory L;
  L.w_profile.x = Expression(0.0);
  L.w_profile.y = Expression(0.0);
  ElasticitySolver s(mesh, mat);
  auto u = s.solve(L, 0.5);
  EXPECT_EQ(u.u.norm(), 0.0);
  auto e = s.energies(u, L, 0.5, edge_crack(0.3));
  EXPECT_EQ(e.elastic, 0.0);
  EXPECT_EQ(e.strain, 0.0);
}

TEST(Elasticity, AffineDisplacementIsReproducedExactly) {
  CrackSet none;
  auto mesh = build_mesh(clamped_square(), none, 0.1, 1.0);
  MaterialModel mat;  // lambda = mu = 1
  LoadTrajectory L;
  L.w_profile.x = Expression::parse("0.1*x + 0.05*y");
  L.w_profile.y = Expression::parse("0.05*x - 0.02*y");
  L.w_amp = TimeSeries::constant(1.0, 1.0);
  ElasticitySolver s(mesh, mat);
  auto u = s.solve(L, 0.3);
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n)
    EXPECT_NEAR((u.at(int(n)) - L.w(mesh.nodes[n], 0.3)).norm(), 0.0, 1e-12);
  // E = 1/2 (lambda tr(A)^2 + 2 mu A:A)
  double trA = 0.08, AA = 0.01 + 2 * 0.0025 + 0.0004;
  auto e = s.energies(u, L, 0.3, none);
  EXPECT_NEAR(e.elastic, 0.5 * (trA * trA + 2 * AA), 1e-12);
}

TEST(Elasticity, InfinitesimalRotationHasNoStrainEnergy) {
  CrackSet none;
  auto mesh = build_mesh(clamped_square(), none, 0.1, 1.0);
  LoadTrajectory L;
  L.w_profile.x = Expression::parse("-0.01*y");
  L.w_profile.y = Expression::parse("0.01*x");
  auto u = solve_equilibrium(mesh, MaterialModel{}, L, 1.0);
  ElasticitySolver s(mesh, MaterialModel{});
  EXPECT_NEAR(s.energies(u, L, 1.0, none).strain, 0.0, 1e-14);
}

TEST(Elasticity, LongerCrackStoresLessEnergyUnderTraction) {
  MaterialModel mat;
  auto L = top_traction();
  double E[2];
  double a[2] = {0.3, 0.4};
  for (int i = 0; i < 2; ++i) {
    auto crack = edge_crack(a[i]);
    auto mesh = build_mesh(traction_square(), crack, 1.0 / 32, 8.0);
    ElasticitySolver s(mesh, mat);
    E[i] = s.energies(s.solve(L, 1.0), L, 1.0, crack).elastic;
  }
  EXPECT_LT(E[1], E[0]);
  EXPECT_LT(E[0], 0.0);  // equals -1/2 of the traction work
}

TEST(Elasticity, EnergyNonincreasingAsCrackGrowsOnTensionBenchmark) {
  auto ctx = tension_benchmark(1.0 / 16);
  double prev = 1e300;
  for (double a : {0.2, 0.3, 0.4, 0.5}) {
    auto crack = edge_crack(a);
    auto mesh = build_mesh(ctx.domain, crack, ctx.mesh);
    ElasticitySolver s(mesh, ctx.material);
    double E = s.energies(s.solve(ctx.loads, 1.0), ctx.loads, 1.0, crack).elastic;
    EXPECT_LT(E, prev) << "a = " << a;
    prev = E;
  }
}

TEST(Elasticity, MissingDirichletDataIsReported) {
  auto d = unit_square({EdgeKind::Free, EdgeKind::Free, EdgeKind::Free, EdgeKind::Free});
  auto mesh = build_mesh(d, edge_crack(0.3), 0.1, 8.0);
  EXPECT_THROW(ElasticitySolver(mesh, MaterialModel{}), SolverError);
}

TEST(Elasticity, SurfaceEnergyOfConstantToughness) {
  MaterialModel mat;
  mat.kappa = ScalarField(2.5);
  auto c = edge_crack(0.3);
  EXPECT_NEAR(surface_energy(c, mat), 2.5 * 0.3, 1e-14);
  CrackSet longer = c;
  longer.components[0] = c.components[0].extended(0.07, 8.0, c.eta);
  EXPECT_NEAR(surface_energy(longer, mat) - surface_energy(c, mat), 2.5 * 0.07, 1e-12);
}

TEST(Elasticity, TotalIsElasticPlusSurface) {
  auto ctx = tension_benchmark(0.1);
  auto crack = edge_crack(0.3);
  auto mesh = build_mesh(ctx.domain, crack, ctx.mesh);
  ElasticitySolver s(mesh, ctx.material);
  auto e = s.energies(s.solve(ctx.loads, 0.7), ctx.loads, 0.7, crack);
  EXPECT_NEAR(e.total, e.elastic + e.surface, 1e-12);
  EXPECT_NEAR(e.elastic, e.strain - e.body_work - e.traction_work, 1e-12);
}

TEST(Elasticity, EquilibriumMinimizesTheFunctional) {
  auto ctx = tension_benchmark(0.1);
  auto crack = edge_crack(0.3);
  auto mesh = build_mesh(ctx.domain, crack, ctx.mesh);
  ElasticitySolver s(mesh, ctx.material);
  double t = 0.8;
  auto u = s.solve(ctx.loads, t);
  EXPECT_TRUE(s.test_function_energy_bound(u, u.u, ctx.loads, t));
  EXPECT_TRUE(s.test_function_energy_bound(u, s.dirichlet_lift(ctx.loads, t), ctx.loads, t));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1e-3);
  const auto& fixed = s.dof_is_dirichlet();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v = u.u;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!fixed[i]) v[i] += N(rng);
    EXPECT_TRUE(s.test_function_energy_bound(u, v, ctx.loads, t));
    EXPECT_GT(s.functional(v, ctx.loads, t), s.functional(u.u, ctx.loads, t));
  }
  Eigen::VectorXd bad = u.u;
  for (Eigen::Index i = 0; i < bad.size(); ++i)
    if (fixed[i]) {
      bad[i] += 1.0;
      break;
    }
  EXPECT_THROW(s.test_function_energy_bound(u, bad, ctx.loads, t), InvalidArgument);
}

TEST(Elasticity, GalerkinResidualVanishesOnFreeDofs) {
  auto ctx = tension_benchmark(0.1);
  auto crack = edge_crack(0.3);
  auto mesh = build_mesh(ctx.domain, crack, ctx.mesh);
  ElasticitySolver s(mesh, ctx.material);
  auto u = s.solve(ctx.loads, 1.0);
  Eigen::VectorXd r = s.stiffness() * u.u - s.load_vector(ctx.loads, 1.0);
  double scale = (s.stiffness() * u.u).norm();
  for (int i : s.free_dofs()) EXPECT_LE(std::abs(r[i]), 1e-9 * scale);
  EXPECT_LE(u.residual, 1e-10);
}

TEST(Elasticity, IterativeSolverMatchesDirect) {
  auto ctx = tension_benchmark(0.1);
  auto crack = edge_crack(0.3);
  auto mesh = build_mesh(ctx.domain, crack, ctx.mesh);
  auto a = solve_equilibrium(mesh, ctx.material, ctx.loads, 1.0);
  auto b = solve_equilibrium(mesh, ctx.material, ctx.loads, 1.0, {true, 1e-12});
  EXPECT_LE((a.u - b.u).norm(), 1e-8 * a.u.norm());
}

TEST(Elasticity, EnergyDecreasesUnderUniformRefinement) {
  // Pure Dirichlet, smooth non-affine datum.
  CrackSet none;
  LoadTrajectory L;
  L.w_profile.x = Expression::parse("0.1*x*x");
  L.w_profile.y = Expression::parse("0.1*x*y");
  std::vector<double> E;
  for (double h : {0.2, 0.1, 0.05}) {
    auto mesh = build_mesh(clamped_square(), none, h, 1.0);
    ElasticitySolver s(mesh, MaterialModel{});
    E.push_back(s.energies(s.solve(L, 1.0), L, 1.0, none).elastic);
  }
  EXPECT_LE(E[1], E[0] + 1e-14);
  EXPECT_LE(E[2], E[1] + 1e-14);
}
