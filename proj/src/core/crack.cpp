#include "vvfrac/crack.hpp"

#include "vvfrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace vvfrac {

namespace {

Vec2 rotate(const Vec2& v, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double turning_angle(const Vec2& d0, const Vec2& d1) {
  return std::atan2(cross(d0, d1), d0.dot(d1));
}

std::string fmt_point(const Vec2& p) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

// Part of the polyline with arc length >= s0.
std::vector<Vec2> tail_from(const CrackComponent& c, double s0) {
  std::vector<Vec2> out;
  if (s0 >= c.length()) return out;
  out.push_back(c.point_at(s0));
  for (std::size_t i = 0; i < c.vertices.size(); ++i)
    if (c.arc_lengths[i] > s0) out.push_back(c.vertices[i]);
  if (out.size() >= 2 && (out[1] - out[0]).norm() == 0.0) out.erase(out.begin());
  return out;
}

double polyline_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double d = std::numeric_limits<double>::infinity();
  if (a.size() == 1 && b.size() == 1) return (a[0] - b[0]).norm();
  if (a.size() == 1) {
    for (std::size_t j = 1; j < b.size(); ++j)
      d = std::min(d, point_segment_distance(a[0], b[j - 1], b[j]));
    return d;
  }
  if (b.size() == 1) return polyline_distance(b, a);
  for (std::size_t i = 1; i < a.size(); ++i)
    for (std::size_t j = 1; j < b.size(); ++j)
      d = std::min(d, segment_segment_distance(a[i - 1], a[i], b[j - 1], b[j]));
  return d;
}

double point_polyline_distance(const Vec2& p, const std::vector<Vec2>& b) {
  if (b.size() == 1) return (p - b[0]).norm();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < b.size(); ++j)
    d = std::min(d, point_segment_distance(p, b[j - 1], b[j]));
  return d;
}

std::vector<Vec2> densify(const std::vector<Vec2>& poly, double step) {
  std::vector<Vec2> out;
  if (poly.empty()) return out;
  out.push_back(poly[0]);
  for (std::size_t i = 1; i < poly.size(); ++i) {
    double L = (poly[i] - poly[i - 1]).norm();
    int n = std::max(1, static_cast<int>(std::ceil(L / step)));
    for (int k = 1; k <= n; ++k) out.push_back(poly[i - 1] + (poly[i] - poly[i - 1]) * (double(k) / n));
  }
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  int add() {
    parent.push_back(static_cast<int>(parent.size()));
    return parent.back();
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

bool same_point(const Vec2& a, const Vec2& b) { return (a - b).norm() <= 1e-12; }

}  // namespace

CrackComponent CrackComponent::from_vertices(std::vector<Vec2> vertices, OriginKind kind,
                                             double frozen_prefix_len) {
  CrackComponent c;
  c.vertices = std::move(vertices);
  c.origin_kind = kind;
  c.validate();
  c.arc_lengths.assign(c.vertices.size(), 0.0);
  for (std::size_t i = 1; i < c.vertices.size(); ++i)
    c.arc_lengths[i] = c.arc_lengths[i - 1] + (c.vertices[i] - c.vertices[i - 1]).norm();
  c.frozen_prefix_len =
      frozen_prefix_len < 0.0 ? c.length() : std::min(frozen_prefix_len, c.length());
  Vec2 d = c.vertices.back() - c.vertices[c.vertices.size() - 2];
  c.tip_tangent = d / d.norm();
  return c;
}

void CrackComponent::validate() const {
  if (vertices.size() < 2) throw StructuralError("crack component needs at least two vertices");
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    if (!((vertices[i] - vertices[i - 1]).norm() > 0.0))
      throw StructuralError("degenerate crack polyline: zero-length segment at " +
                            fmt_point(vertices[i]));
  }
}

Vec2 CrackComponent::point_at(double s) const {
  if (s <= 0.0) return vertices.front();
  if (s >= length()) return vertices.back();
  auto it = std::upper_bound(arc_lengths.begin(), arc_lengths.end(), s);
  std::size_t i = static_cast<std::size_t>(it - arc_lengths.begin());
  double L = arc_lengths[i] - arc_lengths[i - 1];
  double a = (s - arc_lengths[i - 1]) / L;
  return (1.0 - a) * vertices[i - 1] + a * vertices[i];
}

CrackComponent CrackComponent::extended(double dl, double c, double eta) const {
  if (dl < 0.0) throw InvalidArgument("extension length must be nonnegative");
  CrackComponent out = *this;
  if (dl == 0.0) return out;
  int n = 1;
  if (c != 0.0) n = std::max(1, static_cast<int>(std::ceil(dl / (eta / 10.0) - 1e-9)));
  double s = dl / n;
  Vec2 p = tip();
  double len = length();
  for (int k = 0; k < n; ++k) {
    Vec2 dir = rotate(tip_tangent, c * s * (k + 0.5));
    p = p + s * dir;
    len += (p - out.vertices.back()).norm();
    out.vertices.push_back(p);
    out.arc_lengths.push_back(len);
  }
  out.tip_tangent = rotate(tip_tangent, c * dl).normalized();
  return out;
}

CrackComponent CrackComponent::prefix(double len) const {
  if (len >= length() - 1e-14) return *this;
  std::size_t j = 1;
  while (j + 1 < vertices.size() && arc_lengths[j] < len) ++j;
  // segment j-1 -> j contains the cut point
  CrackComponent out = *this;
  out.vertices.resize(j);
  out.arc_lengths.resize(j);
  double rest = len - arc_lengths[j - 1];
  if (rest > 1e-12 || j == 1) {
    rest = std::max(rest, 1e-12);
    Vec2 d = (vertices[j] - vertices[j - 1]).normalized();
    out.vertices.push_back(vertices[j - 1] + rest * d);
    out.arc_lengths.push_back(arc_lengths[j - 1] + rest);
  }
  std::size_t n = out.vertices.size();
  out.tip_tangent = (out.vertices[n - 1] - out.vertices[n - 2]).normalized();
  out.frozen_prefix_len = std::min(frozen_prefix_len, out.length());
  return out;
}

double CrackSet::total_length() const {
  double l = 0.0;
  for (const auto& c : components) l += c.length();
  return l;
}

std::vector<double> CrackSet::lengths() const {
  std::vector<double> l;
  for (const auto& c : components) l.push_back(c.length());
  return l;
}

std::pair<CrackComponent, CrackComponent> split_interior_seed(const std::vector<Vec2>& polyline,
                                                              std::size_t split) {
  if (split == 0 || split + 1 >= polyline.size())
    throw InvalidArgument("split vertex must be an interior vertex of the seed");
  std::vector<Vec2> back(polyline.begin(), polyline.begin() + static_cast<long>(split) + 1);
  std::reverse(back.begin(), back.end());
  std::vector<Vec2> fwd(polyline.begin() + static_cast<long>(split), polyline.end());
  return {CrackComponent::from_vertices(back, OriginKind::InteriorSplit),
          CrackComponent::from_vertices(fwd, OriginKind::InteriorSplit)};
}

const ConstraintStatus* AdmissibilityReport::first_violation() const {
  for (const auto& c : constraints)
    if (!c.ok) return &c;
  return nullptr;
}

const ConstraintStatus& AdmissibilityReport::status(char id) const {
  for (const auto& c : constraints)
    if (c.id == id) return c;
  throw InvalidArgument(std::string("unknown constraint id ") + id);
}

AdmissibilityReport check_admissible(const CrackSet& crack, const Polygon& domain,
                                     const CrackSet* initial) {
  if (crack.components.empty()) throw InvalidArgument("crack set has no components");
  for (const auto& c : crack.components) c.validate();

  const double eta = crack.eta;
  const double diam = domain.diameter();
  const double tol_b = 1e-10 * diam;

  AdmissibilityReport rep;
  auto& C = rep.constraints;
  C.push_back({'a', "C11 arcs, boundary contact only at one endpoint", true, ""});
  C.push_back({'b', "positive length, complement connected", true, ""});
  C.push_back({'c', "double tangent balls", true, ""});
  C.push_back({'d', "components meet in at most one point", true, ""});
  C.push_back({'e', "contains the initial crack", true, ""});
  C.push_back({'f', "2 eta clearance of new parts", true, ""});
  auto fail = [&](char id, const std::string& detail, const Vec2* where) {
    auto& s = C[static_cast<std::size_t>(id - 'a')];
    if (!s.ok) return;
    s.ok = false;
    s.detail = detail;
    if (where) {
      s.has_location = true;
      s.location = *where;
    }
  };

  const std::size_t M = crack.M();

  // (a) curvature, self-intersection, boundary contact
  double max_dip = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const auto& comp = crack.components[m];
    const auto& V = comp.vertices;
    std::size_t n = V.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
      Vec2 d0 = V[i] - V[i - 1], d1 = V[i + 1] - V[i];
      double L0 = d0.norm(), L1 = d1.norm();
      double th = std::abs(turning_angle(d0, d1));
      double k = th / (0.5 * (L0 + L1));
      max_dip = std::max(max_dip, eta * (1.0 - std::cos(th)));
      if (k > (1.0 / eta) * 1.01 + 1e-9) {
        std::ostringstream os;
        os << "component " << m << ": discrete curvature " << k << " exceeds 1/eta = "
           << 1.0 / eta;
        fail('a', os.str(), &V[i]);
      } else if (th > 0.3) {
        std::ostringstream os;
        os << "component " << m << ": turning angle " << th
           << " rad is too coarse to resolve a C11 arc";
        fail('a', os.str(), &V[i]);
      }
    }
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = i + 2; j < n; ++j)
        if (auto p = segment_intersection(V[i - 1], V[i], V[j - 1], V[j], 1e-12)) {
          fail('a', "component " + std::to_string(m) + " self-intersects", &*p);
        }
    bool anchored = comp.origin_kind == OriginKind::BoundaryAnchored;
    if (anchored) {
      if (domain.boundary_distance(V[0]) > tol_b)
        fail('a', "component " + std::to_string(m) + ": anchored origin is not on the boundary",
             &V[0]);
    }
    for (std::size_t i = (anchored ? 1 : 0); i < n; ++i) {
      if (!domain.contains(V[i]) || domain.boundary_distance(V[i]) <= tol_b)
        fail('a', "component " + std::to_string(m) + ": vertex outside or on the boundary",
             &V[i]);
    }
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t e = 0; e < domain.num_edges(); ++e) {
        auto p = segment_intersection(V[i - 1], V[i], domain.edge_start(e), domain.edge_end(e),
                                      tol_b);
        if (p && !(anchored && i == 1 && (*p - V[0]).norm() <= 2 * tol_b))
          fail('a', "component " + std::to_string(m) + " touches the boundary away from its origin",
               &*p);
      }
    }
  }

  // (b) positive length and no cycles through the boundary and contact points
  if (!(crack.total_length() > 0.0)) fail('b', "crack has zero length", nullptr);

  // collect pairwise contacts, used by (b) and (d)
  struct Contact {
    std::size_t m;
    double s;
    Vec2 p;
  };
  std::vector<Contact> contacts;
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i + 1; j < M; ++j) {
      const auto& A = crack.components[i];
      const auto& B = crack.components[j];
      std::vector<Vec2> pts;
      bool overlap_any = false;
      for (std::size_t a = 1; a < A.vertices.size(); ++a) {
        for (std::size_t b = 1; b < B.vertices.size(); ++b) {
          bool overlap = false;
          auto p = segment_intersection(A.vertices[a - 1], A.vertices[a], B.vertices[b - 1],
                                        B.vertices[b], 1e-12, &overlap);
          if (!p) continue;
          overlap_any = overlap_any || overlap;
          bool dup = false;
          for (const auto& q : pts) dup = dup || (q - *p).norm() <= 1e-9;
          if (!dup) pts.push_back(*p);
          double sa = A.arc_lengths[a - 1] + (*p - A.vertices[a - 1]).norm();
          double sb = B.arc_lengths[b - 1] + (*p - B.vertices[b - 1]).norm();
          contacts.push_back({i, sa, *p});
          contacts.push_back({j, sb, *p});
          if (sa > A.frozen_prefix_len + 1e-9 || sb > B.frozen_prefix_len + 1e-9)
            fail('d',
                 "components " + std::to_string(i) + " and " + std::to_string(j) +
                     " meet outside the initial crack",
                 &*p);
        }
      }
      if (overlap_any)
        fail('d', "components " + std::to_string(i) + " and " + std::to_string(j) + " overlap",
             pts.empty() ? nullptr : &pts[0]);
      if (pts.size() > 1)
        fail('d',
             "components " + std::to_string(i) + " and " + std::to_string(j) +
                 " meet in more than one point",
             &pts[1]);
    }
  }
  {
    UnionFind uf;
    int boundary = uf.add();
    std::vector<std::pair<Vec2, int>> point_nodes;
    auto node_for = [&](const Vec2& p) {
      for (auto& [q, id] : point_nodes)
        if ((q - p).norm() <= 1e-9) return id;
      int id = uf.add();
      point_nodes.emplace_back(p, id);
      return id;
    };
    for (std::size_t m = 0; m < M; ++m) {
      const auto& comp = crack.components[m];
      std::vector<std::pair<double, int>> stops;
      if (comp.origin_kind == OriginKind::BoundaryAnchored)
        stops.emplace_back(0.0, boundary);
      else
        stops.emplace_back(0.0, node_for(comp.origin()));
      for (const auto& c : contacts)
        if (c.m == m) stops.emplace_back(c.s, node_for(c.p));
      stops.emplace_back(comp.length(), uf.add());
      std::sort(stops.begin(), stops.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      for (std::size_t k = 1; k < stops.size(); ++k) {
        if (stops[k].second == stops[k - 1].second) continue;
        if (!uf.unite(stops[k - 1].second, stops[k].second)) {
          Vec2 where = comp.point_at(stops[k].first);
          fail('b', "crack pieces close a loop that disconnects the body", &where);
        }
      }
    }
  }

  // (c) double tangent balls at samples, against every segment of the crack
  {
    std::vector<std::vector<Vec2>> chains;
    std::vector<bool> used(M, false);
    for (std::size_t m = 0; m < M; ++m) {
      if (used[m]) continue;
      used[m] = true;
      const auto& A = crack.components[m];
      std::vector<Vec2> chain = A.vertices;
      if (A.origin_kind == OriginKind::InteriorSplit) {
        for (std::size_t j = m + 1; j < M; ++j) {
          const auto& B = crack.components[j];
          if (used[j] || B.origin_kind != OriginKind::InteriorSplit) continue;
          if (!same_point(A.origin(), B.origin())) continue;
          used[j] = true;
          chain.assign(B.vertices.rbegin(), B.vertices.rend());
          chain.insert(chain.end(), A.vertices.begin() + 1, A.vertices.end());
          // the junction of the two halves is an interior vertex of the chain
          std::size_t i = B.vertices.size() - 1;
          Vec2 d0 = chain[i] - chain[i - 1], d1 = chain[i + 1] - chain[i];
          double th = std::abs(turning_angle(d0, d1));
          max_dip = std::max(max_dip, eta * (1.0 - std::cos(th)));
          double k = th / (0.5 * (d0.norm() + d1.norm()));
          if (k > (1.0 / eta) * 1.01 + 1e-9)
            fail('a', "interior seed has a kink at its split point", &chain[i]);
          break;
        }
      }
      chains.push_back(std::move(chain));
    }
    const double tol_c = 1.25 * max_dip + 1e-9 * diam;
    const double step = eta / 10.0;
    auto check_ball = [&](const Vec2& p, const Vec2& normal) {
      for (double sgn : {1.0, -1.0}) {
        Vec2 center = p + sgn * eta * normal;
        for (const auto& ch : chains) {
          for (std::size_t j = 1; j < ch.size(); ++j) {
            if (point_segment_distance(center, ch[j - 1], ch[j]) < eta - tol_c) {
              fail('c', "tangent ball of radius eta at " + fmt_point(p) + " meets the crack", &p);
              return false;
            }
          }
        }
      }
      return true;
    };
    for (const auto& ch : chains) {
      bool ok = true;
      for (std::size_t i = 0; i < ch.size() && ok; ++i) {
        Vec2 t;
        if (i == 0)
          t = (ch[1] - ch[0]).normalized();
        else if (i + 1 == ch.size())
          t = (ch[i] - ch[i - 1]).normalized();
        else
          t = ((ch[i] - ch[i - 1]).normalized() + (ch[i + 1] - ch[i]).normalized()).normalized();
        ok = check_ball(ch[i], perp(t));
        if (i + 1 < ch.size() && ok) {
          Vec2 d = ch[i + 1] - ch[i];
          int n = static_cast<int>(std::ceil(d.norm() / step));
          Vec2 nrm = perp(d.normalized());
          for (int k = 1; k < n && ok; ++k) ok = check_ball(ch[i] + d * (double(k) / n), nrm);
        }
      }
    }
  }

  // (e) irreversibility
  for (std::size_t m = 0; m < M; ++m) {
    const auto& comp = crack.components[m];
    if (comp.frozen_prefix_len < 0.0 || comp.frozen_prefix_len > comp.length() + 1e-12)
      fail('e', "component " + std::to_string(m) + ": frozen prefix length out of range",
           &comp.vertices[0]);
  }
  if (initial) {
    if (initial->M() != M) {
      fail('e', "number of components differs from the initial crack", nullptr);
    } else {
      for (std::size_t m = 0; m < M; ++m) {
        const auto& c0 = initial->components[m].vertices;
        const auto& c1 = crack.components[m].vertices;
        bool prefix = c0.size() <= c1.size() && std::equal(c0.begin(), c0.end(), c1.begin());
        if (!prefix)
          fail('e', "component " + std::to_string(m) + " does not extend the initial crack",
               &c1.back());
      }
    }
  }

  // (f) clearance of the grown parts
  for (std::size_t m = 0; m < M; ++m) {
    const auto& comp = crack.components[m];
    auto tail = tail_from(comp, comp.frozen_prefix_len);
    if (tail.empty()) continue;
    const double need = 2.0 * eta - 1e-12;
    for (std::size_t i = 0; i < tail.size(); ++i) {
      double db = (tail.size() == 1) ? domain.boundary_distance(tail[0])
                  : (i > 0)          ? domain.segment_boundary_distance(tail[i - 1], tail[i])
                                     : domain.boundary_distance(tail[0]);
      if (db < need) {
        fail('f', "component " + std::to_string(m) + " grows within 2 eta of the boundary",
             &tail[i]);
        break;
      }
    }
    for (std::size_t j = 0; j < M; ++j) {
      if (j == m) continue;
      double d = polyline_distance(tail, crack.components[j].vertices);
      if (d < need) {
        fail('f',
             "component " + std::to_string(m) + " grows within 2 eta of component " +
                 std::to_string(j),
             &tail.back());
        break;
      }
    }
  }

  rep.pass = std::all_of(C.begin(), C.end(), [](const auto& s) { return s.ok; });
  return rep;
}

PointSet to_point_set(const CrackSet& crack) {
  PointSet ps;
  for (const auto& c : crack.components) ps.push_back(c.vertices);
  return ps;
}

double hausdorff_distance(const PointSet& a, const PointSet& b, double densify_tol,
                          double diam) {
  bool ea = a.empty(), eb = b.empty();
  if (ea && eb) return 0.0;
  if (ea || eb) return diam;
  if (a == b) return 0.0;  // densified points do not project back exactly
  auto directed = [&](const PointSet& from, const PointSet& to) {
    double sup = 0.0;
    for (const auto& poly : from) {
      for (const auto& p : densify(poly, densify_tol)) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& q : to) d = std::min(d, point_polyline_distance(p, q));
        sup = std::max(sup, d);
      }
    }
    return sup;
  };
  return std::max(directed(a, b), directed(b, a));
}

double hausdorff_distance(const CrackSet& a, const CrackSet& b, double densify_tol,
                          double diam) {
  return hausdorff_distance(to_point_set(a), to_point_set(b), densify_tol, diam);
}

std::vector<ExtensionCandidate> generate_extensions(const CrackSet& crack, std::size_t m,
                                                    const std::vector<double>& lengths,
                                                    const std::vector<double>& curvatures,
                                                    const Polygon& domain) {
  if (m >= crack.M()) throw InvalidArgument("unknown tip index " + std::to_string(m));
  for (double c : curvatures)
    if (std::abs(c) > (1.0 / crack.eta) * (1.0 + 1e-12))
      throw InvalidArgument("extension curvature exceeds 1/eta");
  for (double l : lengths)
    if (l < 0.0) throw InvalidArgument("extension lengths must be nonnegative");

  std::vector<ExtensionCandidate> out;
  out.push_back({m, 0.0, 0.0, crack.components[m]});
  for (double l : lengths) {
    if (l == 0.0) continue;
    for (double c : curvatures) {
      CrackSet next = crack;
      next.components[m] = crack.components[m].extended(l, c, crack.eta);
      if (!check_admissible(next, domain, &crack).pass) continue;
      ExtensionCandidate cand;
      cand.component_index = m;
      cand.delta_length = next.components[m].length() - crack.components[m].length();
      cand.signed_curvature = c;
      cand.resulting_component = std::move(next.components[m]);
      out.push_back(std::move(cand));
    }
  }
  return out;
}

double max_admissible_extension(const CrackSet& crack, std::size_t m, double c,
                                const Polygon& domain, double upper, double tol) {
  if (m >= crack.M()) throw InvalidArgument("unknown tip index " + std::to_string(m));
  auto ok = [&](double l) {
    CrackSet next = crack;
    next.components[m] = crack.components[m].extended(l, c, crack.eta);
    return check_admissible(next, domain, &crack).pass;
  };
  if (ok(upper)) return upper;
  double lo = 0.0, hi = upper;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::pair<Vec2, Vec2> tip_and_tangent(const CrackSet& crack, std::size_t m) {
  if (m >= crack.M()) throw InvalidArgument("unknown tip index " + std::to_string(m));
  const auto& c = crack.components[m];
  return {c.tip(), c.tip_tangent};
}

double tip_distance_to_others(const CrackSet& crack, std::size_t m) {
  double d = std::numeric_limits<double>::infinity();
  const Vec2& tip = crack.components[m].tip();
  for (std::size_t j = 0; j < crack.M(); ++j)
    if (j != m) d = std::min(d, point_polyline_distance(tip, crack.components[j].vertices));
  return d;
}

}  // namespace vvfrac
