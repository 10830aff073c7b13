#pragma once

// Conforming Delaunay refinement of a planar straight-line graph. Internal to
// the mesh builder.

#include "vvfrac/geometry.hpp"

#include <array>
#include <functional>
#include <vector>

namespace vvfrac::detail {

struct Segment {
  int a = 0;
  int b = 0;
  int kind = 0;  // 0 = domain boundary, 1 = crack
  int id = 0;    // polygon edge or crack component
};

struct TriangulationInput {
  std::vector<Vec2> points;
  std::vector<Segment> segments;  // must not cross each other
  std::function<double(const Vec2&)> size;  // target edge length
  const Polygon* domain = nullptr;
  double quality = 1.41421356237;  // max circumradius / shortest edge
  std::size_t max_points = 2'000'000;
};

struct TriangulationOutput {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise, inside the domain
  std::vector<Segment> segments;               // final subsegments
};

TriangulationOutput triangulate(const TriangulationInput& in);

}  // namespace vvfrac::detail
