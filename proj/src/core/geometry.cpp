#include "vvfrac/geometry.hpp"

#include "vvfrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace vvfrac {

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  // long double keeps near-cocircular grids from flipping sign randomly
  long double adx = a.x() - d.x(), ady = a.y() - d.y();
  long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  long double ad = adx * adx + ady * ady;
  long double bd = bdx * bdx + bdy * bdy;
  long double cd = cdx * cdx + cdy * cdy;
  long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                    ad * (bdx * cdy - bdy * cdx);
  return static_cast<double>(det);
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  Vec2 ba = b - a, ca = c - a;
  double d = 2.0 * cross(ba, ca);
  double b2 = ba.squaredNorm(), c2 = ca.squaredNorm();
  return a + Vec2(ca.y() * b2 - ba.y() * c2, ba.x() * c2 - ca.x() * b2) / d;
}

Vec2 project_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double l2 = ab.squaredNorm();
  if (l2 == 0.0) return a;
  double s = std::clamp((p - a).dot(ab) / l2, 0.0, 1.0);
  return a + s * ab;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  return (p - project_to_segment(p, a, b)).norm();
}

std::optional<Vec2> segment_intersection(const Vec2& a, const Vec2& b, const Vec2& c,
                                         const Vec2& d, double snap, bool* overlap) {
  if (overlap) *overlap = false;
  Vec2 r = b - a, s = d - c;
  double denom = cross(r, s);
  double scale = std::max(r.norm(), s.norm());
  if (std::abs(denom) <= 1e-14 * scale * scale) {
    // parallel: only endpoint contacts or collinear overlaps are possible
    double best = std::numeric_limits<double>::infinity();
    Vec2 hit;
    for (const auto& [p, q0, q1] : {std::tuple{a, c, d}, std::tuple{b, c, d},
                                    std::tuple{c, a, b}, std::tuple{d, a, b}}) {
      double dist = point_segment_distance(p, q0, q1);
      if (dist < best) {
        best = dist;
        hit = p;
      }
    }
    if (best > snap) return std::nullopt;
    // collinear: count how many endpoints lie on the other segment
    int on = 0;
    Vec2 sum = Vec2::Zero();
    for (const auto& [p, q0, q1] : {std::tuple{a, c, d}, std::tuple{b, c, d},
                                    std::tuple{c, a, b}, std::tuple{d, a, b}}) {
      if (point_segment_distance(p, q0, q1) <= snap) {
        ++on;
        sum += p;
      }
    }
    if (on >= 2) {
      // touching at a single shared endpoint is not an overlap
      bool shared = ((a - c).norm() <= snap || (a - d).norm() <= snap ||
                     (b - c).norm() <= snap || (b - d).norm() <= snap);
      if (!(shared && on == 2) && overlap) *overlap = true;
      if (!(shared && on == 2)) return sum / on;
    }
    return hit;
  }
  double t = cross(c - a, s) / denom;
  double u = cross(c - a, r) / denom;
  double lr = r.norm(), ls = s.norm();
  double tt = snap / lr, tu = snap / ls;
  if (t < -tt || t > 1.0 + tt || u < -tu || u > 1.0 + tu) return std::nullopt;
  return a + std::clamp(t, 0.0, 1.0) * r;
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segment_intersection(a, b, c, d, 0.0)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw StructuralError("polygon needs at least 3 vertices");
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

bool Polygon::contains(const Vec2& p) const {
  bool inside = false;
  std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& vi = vertices_[i];
    const Vec2& vj = vertices_[j];
    if ((vi.y() > p.y()) != (vj.y() > p.y())) {
      double x = vj.x() + (p.y() - vj.y()) * (vi.x() - vj.x()) / (vi.y() - vj.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double Polygon::boundary_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < num_edges(); ++e)
    d = std::min(d, point_segment_distance(p, edge_start(e), edge_end(e)));
  return d;
}

double Polygon::segment_boundary_distance(const Vec2& a, const Vec2& b) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < num_edges(); ++e)
    d = std::min(d, segment_segment_distance(a, b, edge_start(e), edge_end(e)));
  return d;
}

int Polygon::edge_containing(const Vec2& p, double tol) const {
  int best = -1;
  double bd = tol;
  for (std::size_t e = 0; e < num_edges(); ++e) {
    double d = point_segment_distance(p, edge_start(e), edge_end(e));
    if (d <= bd) {
      bd = d;
      best = static_cast<int>(e);
    }
  }
  return best;
}

double Polygon::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  return 0.5 * a;
}

double Polygon::diameter() const {
  double d = 0.0;
  for (const auto& p : vertices_)
    for (const auto& q : vertices_) d = std::max(d, (p - q).norm());
  return d;
}

bool Polygon::is_simple() const {
  std::size_t n = num_edges();
  for (std::size_t i = 0; i < n; ++i) {
    if ((edge_end(i) - edge_start(i)).norm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segment_intersection(edge_start(i), edge_end(i), edge_start(j), edge_end(j), 0.0))
        return false;
    }
  }
  return area() > 0.0;
}

double polyline_length(std::span<const Vec2> pts) {
  double l = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) l += (pts[i] - pts[i - 1]).norm();
  return l;
}

}  // namespace vvfrac
