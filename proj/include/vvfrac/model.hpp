#pragma once

#include "vvfrac/expression.hpp"
#include "vvfrac/geometry.hpp"

#include <string>
#include <vector>

namespace vvfrac {

enum class EdgeKind { Free, Dirichlet, Traction };

// Polygonal body with each boundary edge tagged as free, Dirichlet or traction.
struct DomainSpec {
  Polygon polygon;
  std::vector<EdgeKind> edge_kinds;  // one per polygon edge

  DomainSpec() = default;
  DomainSpec(Polygon p, std::vector<EdgeKind> kinds);

  // Throws ConfigError when a traction edge touches the closure of the
  // Dirichlet part, or the tag list does not match the polygon.
  void validate() const;
  bool has_dirichlet() const;
};

// Scalar field given by an expression; gradients are exact (forward mode).
struct ScalarField {
  Expression expr;
  ScalarField() = default;
  explicit ScalarField(double c) : expr(c) {}
  explicit ScalarField(Expression e) : expr(std::move(e)) {}
  double operator()(const Vec2& p) const { return expr(p.x(), p.y()); }
  Vec2 gradient(const Vec2& p) const {
    auto v = expr.eval(p.x(), p.y());
    return {v.dx, v.dy};
  }
};

struct MaterialModel {
  ScalarField lambda{1.0};
  ScalarField mu{1.0};
  ScalarField kappa{1.0};
  double kappa1 = 1.0;  // declared lower bound of kappa
  double kappa2 = 1.0;  // declared upper bound of kappa

  // Samples the fields on a grid over the polygon bounding box (points inside
  // only) and returns one message per violated hypothesis.
  std::vector<std::string> validate(const Polygon& poly, int samples_per_axis = 21) const;
};

// Piecewise-linear scalar history.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> v;

  static TimeSeries constant(double value, double T);
  static TimeSeries ramp(double v0, double v1, double T);

  double at(double time) const;
  // Slope of the piece containing `time`; at a sample node the piece to the
  // left is used unless `right` is set.
  double rate(double time, bool right = false) const;
  double start() const { return t.front(); }
  double end() const { return t.back(); }
};

struct VectorField {
  Expression x;
  Expression y;
  Vec2 operator()(const Vec2& p) const { return {x(p.x(), p.y()), y(p.x(), p.y())}; }
  bool is_zero() const;
};

// Loads of the form  w(x,t) = a_w(t) W(x),  f(x,t) = a_f(t) F(x),
// g(x,t) = a_g(t) G(x).
struct LoadTrajectory {
  double T = 1.0;
  VectorField w_profile;
  TimeSeries w_amp = TimeSeries::ramp(0.0, 1.0, 1.0);
  VectorField f_profile;
  TimeSeries f_amp = TimeSeries::constant(0.0, 1.0);
  VectorField g_profile;
  TimeSeries g_amp = TimeSeries::constant(0.0, 1.0);

  Vec2 w(const Vec2& p, double t) const { return w_amp.at(t) * w_profile(p); }
  Vec2 f(const Vec2& p, double t) const { return f_amp.at(t) * f_profile(p); }
  Vec2 g(const Vec2& p, double t) const { return g_amp.at(t) * g_profile(p); }
  Vec2 w_rate(const Vec2& p, double t, bool right = false) const {
    return w_amp.rate(t, right) * w_profile(p);
  }
  Vec2 f_rate(const Vec2& p, double t, bool right = false) const {
    return f_amp.rate(t, right) * f_profile(p);
  }
  Vec2 g_rate(const Vec2& p, double t, bool right = false) const {
    return g_amp.rate(t, right) * g_profile(p);
  }
  bool has_body_force() const { return !f_profile.is_zero(); }
  bool has_traction() const { return !g_profile.is_zero(); }

  // Messages for samples that do not cover [0, T] or are not increasing.
  std::vector<std::string> validate() const;
};

}  // namespace vvfrac
