#pragma once

#include "vvfrac/error.hpp"
#include "vvfrac/viscosity.hpp"

#include <random>
#include <string>

namespace vvtest {

using namespace vvfrac;

inline CrackSet straight_crack(Vec2 a, Vec2 b, double eta = 0.05) {
  CrackSet c;
  c.eta = eta;
  c.components.push_back(CrackComponent::from_vertices({a, b}, OriginKind::BoundaryAnchored));
  return c;
}

inline CrackSet edge_crack(double a, double eta = 0.05) {
  return straight_crack({0.0, 0.5}, {a, 0.5}, eta);
}

inline DomainSpec unit_square(std::vector<EdgeKind> kinds) {
  return DomainSpec(Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), std::move(kinds));
}

// Edge-cracked unit square pulled apart: bottom and top edges held, w_y = 2y - 1
// ramped to 1 at t = 1, sides free.
inline EvolutionContext tension_benchmark(double h, double grading = 8.0) {
  EvolutionContext ctx;
  ctx.domain = unit_square({EdgeKind::Dirichlet, EdgeKind::Free, EdgeKind::Dirichlet, EdgeKind::Free});
  ctx.loads.w_profile.x = Expression(0.0);
  ctx.loads.w_profile.y = Expression::parse("2*y - 1");
  ctx.loads.w_amp = TimeSeries::ramp(0.0, 1.0, 1.0);
  ctx.mesh.h = h;
  ctx.mesh.tip_grading = grading;
  return ctx;
}

// Double cantilever: the left edge is held on two short pieces above and below
// the crack mouth, which are pulled apart; the rest of the boundary is free.
inline EvolutionContext dcb(double h, double amp, const std::string& kappa = "1",
                            double kappa1 = 1.0, double kappa2 = 1.0) {
  EvolutionContext ctx;
  ctx.domain = DomainSpec(Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0.6}, {0, 0.4}}),
                          {EdgeKind::Free, EdgeKind::Free, EdgeKind::Free, EdgeKind::Dirichlet,
                           EdgeKind::Free, EdgeKind::Dirichlet});
  ctx.loads.w_profile.x = Expression(0.0);
  ctx.loads.w_profile.y = Expression::parse("min(1, max(-1, (y - 0.5) * 10))");
  ctx.loads.w_amp = TimeSeries::ramp(0.0, amp, 1.0);
  ctx.material.kappa = ScalarField(Expression::parse(kappa));
  ctx.material.kappa1 = kappa1;
  ctx.material.kappa2 = kappa2;
  ctx.mesh.h = h;
  ctx.mesh.tip_grading = 8.0;
  return ctx;
}

// The jump scenario: toughness drops from 1 to 0.5 just past the seed tip and
// the opening is held after t = 0.6.
inline EvolutionContext dcb_jump(double h) {
  EvolutionContext ctx = dcb(h, 1.2, "max(0.5, min(1, 1 - 8 * (x - 0.3)))", 0.5, 1.0);
  ctx.loads.w_amp = TimeSeries{{0.0, 0.6, 1.0}, {0.0, 0.72, 0.72}};
  return ctx;
}

inline SearchConfig straight_search() {
  SearchConfig s;
  s.curvature_factors = {0.0};
  return s;
}

}  // namespace vvtest
