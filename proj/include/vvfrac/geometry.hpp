#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace vvfrac {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Rotates by +pi/2.
inline Vec2 perp(const Vec2& a) { return {-a.y(), a.x()}; }

// Twice the signed area of (a, b, c); positive for counter-clockwise.
double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// Positive if d lies strictly inside the circumcircle of the CCW triangle abc.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Closest point of [a,b] to p.
Vec2 project_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Intersection of closed segments [a,b] and [c,d]. Returns the intersection
// point for proper or touching intersections; for collinear overlaps returns
// the overlap midpoint and sets *overlap. `snap` is the absolute tolerance.
std::optional<Vec2> segment_intersection(const Vec2& a, const Vec2& b, const Vec2& c,
                                         const Vec2& d, double snap, bool* overlap = nullptr);

// Simple polygon given by its vertices in counter-clockwise order.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t num_edges() const { return vertices_.size(); }
  Vec2 edge_start(std::size_t e) const { return vertices_[e]; }
  Vec2 edge_end(std::size_t e) const { return vertices_[(e + 1) % vertices_.size()]; }

  bool contains(const Vec2& p) const;
  double boundary_distance(const Vec2& p) const;
  double segment_boundary_distance(const Vec2& a, const Vec2& b) const;
  // Index of an edge within `tol` of p, preferring the closest; -1 if none.
  int edge_containing(const Vec2& p, double tol) const;
  double area() const;
  double diameter() const;
  bool is_simple() const;

 private:
  std::vector<Vec2> vertices_;
};

// Length of a polyline.
double polyline_length(std::span<const Vec2> pts);

}  // namespace vvfrac
