#pragma once

#include "vvfrac/geometry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace vvfrac {

enum class OriginKind { BoundaryAnchored, InteriorSplit };

// One arc of the crack, stored as a polyline running from its origin (a
// boundary point or the split point of an interior seed) to its tip.
struct CrackComponent {
  std::vector<Vec2> vertices;
  std::vector<double> arc_lengths;
  OriginKind origin_kind = OriginKind::BoundaryAnchored;
  double frozen_prefix_len = 0.0;
  // Unit tangent at the tip. Equals the last segment direction for plain
  // polylines; arcs produced by `extend` carry their exact end tangent.
  Vec2 tip_tangent = Vec2::UnitX();

  // Builds the component, computing arc lengths and the default tangent.
  // A negative frozen length freezes the whole polyline.
  static CrackComponent from_vertices(std::vector<Vec2> vertices, OriginKind kind,
                                      double frozen_prefix_len = -1.0);

  double length() const { return arc_lengths.back(); }
  const Vec2& tip() const { return vertices.back(); }
  const Vec2& origin() const { return vertices.front(); }
  // Point at arc length s (clamped).
  Vec2 point_at(double s) const;

  // Throws StructuralError on fewer than two vertices or a zero-length segment.
  void validate() const;

  // Appends a discrete arc of length dl and signed curvature c starting at the
  // tip with the tip tangent: n equal chords with uniform turning, so the
  // polyline length grows by exactly dl and the tangent rotates by c*dl.
  CrackComponent extended(double dl, double c, double eta) const;

  // The initial part of arc length `len` (at least one segment is kept). The
  // tip tangent becomes the direction of the cut segment.
  CrackComponent prefix(double len) const;
};

struct CrackSet {
  std::vector<CrackComponent> components;
  double eta = 0.05;

  std::size_t M() const { return components.size(); }
  double total_length() const;
  std::vector<double> lengths() const;
};

// Splits an interior seed at vertex `split` into two interior-split components
// that both start at the split point.
std::pair<CrackComponent, CrackComponent> split_interior_seed(const std::vector<Vec2>& polyline,
                                                              std::size_t split);

struct ConstraintStatus {
  char id = 'a';
  std::string name;
  bool ok = true;
  std::string detail;
  bool has_location = false;
  Vec2 location = Vec2::Zero();
};

struct AdmissibilityReport {
  bool pass = true;
  std::vector<ConstraintStatus> constraints;  // (a) through (f), in order
  const ConstraintStatus* first_violation() const;
  const ConstraintStatus& status(char id) const;
};

// Checks the admissibility conditions (a)-(f) at sampling step eta/10. When
// `initial` is given, (e) also verifies that every initial component is a
// polyline prefix of the corresponding current one.
AdmissibilityReport check_admissible(const CrackSet& crack, const Polygon& domain,
                                     const CrackSet* initial = nullptr);

// Point sets are unions of polylines; a single-vertex polyline is a point.
using PointSet = std::vector<std::vector<Vec2>>;
PointSet to_point_set(const CrackSet& crack);

// Hausdorff distance between the sets densified at `densify_tol`. An empty set
// is at distance `diam` from a non-empty one; two empty sets are at distance 0.
double hausdorff_distance(const PointSet& a, const PointSet& b, double densify_tol,
                          double diam);
double hausdorff_distance(const CrackSet& a, const CrackSet& b, double densify_tol,
                          double diam);

struct ExtensionCandidate {
  std::size_t component_index = 0;
  double delta_length = 0.0;
  double signed_curvature = 0.0;
  CrackComponent resulting_component;
};

// Candidates for every (length, curvature) pair that keep the crack admissible.
// The zero-length candidate is always returned first.
std::vector<ExtensionCandidate> generate_extensions(const CrackSet& crack, std::size_t m,
                                                    const std::vector<double>& lengths,
                                                    const std::vector<double>& curvatures,
                                                    const Polygon& domain);

// Largest dl <= upper such that extending tip m by an arc of curvature c stays
// admissible, located by bisection to `tol`.
double max_admissible_extension(const CrackSet& crack, std::size_t m, double c,
                                const Polygon& domain, double upper, double tol);

std::pair<Vec2, Vec2> tip_and_tangent(const CrackSet& crack, std::size_t m);

// Distance from the tip of component m to every other component.
double tip_distance_to_others(const CrackSet& crack, std::size_t m);

}  // namespace vvfrac
