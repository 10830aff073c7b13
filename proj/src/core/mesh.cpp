#include "vvfrac/mesh.hpp"

#include "triangulation.hpp"
#include "vvfrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace vvfrac {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::string fmt_point(const Vec2& p) {
  std::ostringstream os;
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

// Drops crack vertices that would force elements far below the local target
// size while barely changing the geometry: exactly collinear vertices, and
// vertices closer than a quarter of the local size to a kept neighbor with a
// small chord deviation.
std::vector<Vec2> simplify_for_mesh(const std::vector<Vec2>& v,
                                    const std::function<double(const Vec2&)>& size,
                                    double diam) {
  std::vector<Vec2> out{v.front()};
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const Vec2& prev = out.back();
    const Vec2& next = v[i + 1];
    double dev = point_segment_distance(v[i], prev, next);
    double s = size(v[i]);
    bool collinear = dev <= 1e-13 * diam;
    bool crowded = ((v[i] - prev).norm() < 0.25 * s || (v[i] - next).norm() < 0.25 * s) &&
                   dev <= 0.02 * s;
    if (!collinear && !crowded) out.push_back(v[i]);
  }
  out.push_back(v.back());
  return out;
}

void presplit(const Vec2& a, const Vec2& b, const std::function<double(const Vec2&)>& size,
              std::vector<Vec2>& out, int depth = 0) {
  Vec2 m = 0.5 * (a + b);
  if ((b - a).norm() > size(m) && depth < 40) {
    presplit(a, m, size, out, depth + 1);
    out.push_back(m);
    presplit(m, b, size, out, depth + 1);
  }
}

}  // namespace

double CrackedMesh::triangle_area(std::size_t t) const {
  const auto& tr = triangles[t];
  return 0.5 * orient2d(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]);
}

double CrackedMesh::local_size(int n) const {
  double s = 0.0;
  for (const auto& tr : triangles) {
    if (tr[0] != n && tr[1] != n && tr[2] != n) continue;
    for (int i = 0; i < 3; ++i) s = std::max(s, (nodes[tr[i]] - nodes[tr[(i + 1) % 3]]).norm());
  }
  return s;
}

double CrackedMesh::min_area() const {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < triangles.size(); ++t) a = std::min(a, triangle_area(t));
  return a;
}

CrackedMesh CrackedMesh::morphed(const std::vector<Vec2>& displacement) const {
  if (displacement.size() != nodes.size())
    throw StructuralError("morph displacement does not match the mesh");
  CrackedMesh out = *this;
  for (std::size_t i = 0; i < nodes.size(); ++i) out.nodes[i] += displacement[i];
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    double a0 = triangle_area(t), a1 = out.triangle_area(t);
    if (!(a1 > 1e-3 * a0)) {
      const auto& tr = triangles[t];
      throw MeshingError("mesh morph inverts a triangle near " +
                         fmt_point((nodes[tr[0]] + nodes[tr[1]] + nodes[tr[2]]) / 3.0));
    }
  }
  return out;
}

std::string CrackedMesh::to_msh() const {
  std::ostringstream os;
  os.precision(17);
  os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  os << "$Nodes\n" << nodes.size() << "\n";
  for (std::size_t i = 0; i < nodes.size(); ++i)
    os << i + 1 << " " << nodes[i].x() << " " << nodes[i].y() << " 0\n";
  os << "$EndNodes\n";
  std::size_t ne = triangles.size() + boundary_edges.size() + crack_edges.size();
  os << "$Elements\n" << ne << "\n";
  std::size_t id = 1;
  for (std::size_t i = 0; i < boundary_edges.size(); ++i) {
    int tag = boundary_kind[i] == EdgeKind::Dirichlet ? 12
              : boundary_kind[i] == EdgeKind::Traction ? 13
                                                       : 11;
    os << id++ << " 1 2 " << tag << " " << boundary_edges[i].owner + 1 << " "
       << boundary_edges[i].a + 1 << " " << boundary_edges[i].b + 1 << "\n";
  }
  for (const auto& e : crack_edges)
    os << id++ << " 1 2 20 " << e.owner + 1 << " " << e.a + 1 << " " << e.b + 1 << "\n";
  for (const auto& t : triangles)
    os << id++ << " 2 2 1 1 " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  os << "$EndElements\n";
  return os.str();
}

double mesh_size_at(const Vec2& p, const CrackSet& crack, const MeshOptions& opt) {
  double s = opt.h;
  double g = std::max(1.0, opt.tip_grading);
  double R = opt.grading_rings * opt.h;
  for (const auto& c : crack.components) {
    double d = (p - c.tip()).norm();
    double u = std::min(1.0, d / R);
    s = std::min(s, (opt.h / g) * std::pow(g, u));
  }
  return s;
}

CrackedMesh build_mesh(const DomainSpec& domain, const CrackSet& crack, double h,
                       double tip_grading) {
  MeshOptions opt;
  opt.h = h;
  opt.tip_grading = tip_grading;
  return build_mesh(domain, crack, opt);
}

CrackedMesh build_mesh(const DomainSpec& domain, const CrackSet& crack, const MeshOptions& opt) {
  if (!(opt.h > 0.0)) throw InvalidArgument("mesh size h must be positive");
  const Polygon& poly = domain.polygon;
  const double diam = poly.diameter();
  const double snap = 1e-6 * diam;
  auto size = [&](const Vec2& p) { return mesh_size_at(p, crack, opt); };

  detail::TriangulationInput in;
  in.domain = &poly;
  in.size = size;
  in.quality = opt.quality;

  auto add_point = [&](const Vec2& p) {
    for (std::size_t i = 0; i < in.points.size(); ++i)
      if ((in.points[i] - p).norm() <= 1e-12 * diam) return static_cast<int>(i);
    in.points.push_back(p);
    return static_cast<int>(in.points.size()) - 1;
  };
  for (const auto& v : poly.vertices()) add_point(v);

  // crack polylines, with the mouths of anchored components projected on
  // their boundary edge
  std::vector<std::vector<Vec2>> cracks;
  std::vector<std::vector<std::pair<double, Vec2>>> mouths(poly.num_edges());
  for (std::size_t m = 0; m < crack.M(); ++m) {
    const auto& comp = crack.components[m];
    comp.validate();
    std::vector<Vec2> v = simplify_for_mesh(comp.vertices, size, diam);
    for (const auto& p : v)
      for (const auto& q : poly.vertices())
        if ((p - q).norm() <= snap)
          throw MeshingError("crack vertex " + fmt_point(p) +
                             " lies within snap tolerance of domain corner " + fmt_point(q));
    if (comp.origin_kind == OriginKind::BoundaryAnchored) {
      int e = poly.edge_containing(v.front(), 1e-9 * diam);
      if (e < 0)
        throw MeshingError("crack mouth " + fmt_point(v.front()) + " is not on the boundary");
      Vec2 a = poly.edge_start(e), b = poly.edge_end(e);
      v.front() = project_to_segment(v.front(), a, b);
      mouths[e].emplace_back((v.front() - a).norm(), v.front());
    }
    cracks.push_back(std::move(v));
  }

  for (std::size_t e = 0; e < poly.num_edges(); ++e) {
    std::vector<Vec2> stops{poly.edge_start(e)};
    auto ms = mouths[e];
    std::sort(ms.begin(), ms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [s, p] : ms) stops.push_back(p);
    stops.push_back(poly.edge_end(e));
    for (std::size_t k = 1; k < stops.size(); ++k) {
      std::vector<Vec2> pts{stops[k - 1]};
      presplit(stops[k - 1], stops[k], size, pts);
      pts.push_back(stops[k]);
      for (std::size_t j = 1; j < pts.size(); ++j)
        in.segments.push_back({add_point(pts[j - 1]), add_point(pts[j]), 0, static_cast<int>(e)});
    }
  }
  for (std::size_t m = 0; m < cracks.size(); ++m) {
    const auto& v = cracks[m];
    for (std::size_t i = 1; i < v.size(); ++i) {
      std::vector<Vec2> pts{v[i - 1]};
      presplit(v[i - 1], v[i], size, pts);
      pts.push_back(v[i]);
      for (std::size_t j = 1; j < pts.size(); ++j)
        in.segments.push_back({add_point(pts[j - 1]), add_point(pts[j]), 1, static_cast<int>(m)});
    }
  }

  detail::TriangulationOutput tri = detail::triangulate(in);

  CrackedMesh mesh;
  mesh.h = opt.h;
  mesh.grading = opt.tip_grading;
  mesh.nodes = tri.points;
  mesh.triangles = tri.triangles;
  mesh.vertex_of.resize(mesh.nodes.size());
  std::iota(mesh.vertex_of.begin(), mesh.vertex_of.end(), 0);

  std::unordered_map<std::uint64_t, std::vector<int>> edge_tris;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int i = 0; i < 3; ++i)
      edge_tris[edge_key(mesh.triangles[t][i], mesh.triangles[t][(i + 1) % 3])].push_back(
          static_cast<int>(t));

  // oriented edge (a, b) as it appears in triangle t
  auto oriented = [&](int t, int a, int b) {
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      if (tr[i] == a && tr[(i + 1) % 3] == b) return std::pair{a, b};
    return std::pair{b, a};
  };

  std::unordered_map<std::uint64_t, char> is_crack;
  for (const auto& s : tri.segments) {
    auto it = edge_tris.find(edge_key(s.a, s.b));
    if (it == edge_tris.end()) throw MeshingError("subsegment missing from the triangulation");
    if (s.kind == 0) {
      if (it->second.size() != 1) throw MeshingError("boundary subsegment is not on the hull");
      int t = it->second[0];
      auto [a, b] = oriented(t, s.a, s.b);
      mesh.boundary_edges.push_back({a, b, t, s.id});
      mesh.boundary_kind.push_back(domain.edge_kinds.empty()
                                       ? EdgeKind::Free
                                       : domain.edge_kinds[static_cast<std::size_t>(s.id)]);
    } else {
      if (it->second.size() != 2) throw MeshingError("crack subsegment does not have two sides");
      is_crack[edge_key(s.a, s.b)] = 1;
      for (int t : it->second) {
        auto [a, b] = oriented(t, s.a, s.b);
        mesh.crack_edges.push_back({a, b, t, s.id});
      }
    }
  }

  // duplicate crack nodes: one copy per fan sector between crack edges
  std::vector<std::vector<int>> vert_tris(mesh.nodes.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int i = 0; i < 3; ++i) vert_tris[mesh.triangles[t][i]].push_back(static_cast<int>(t));
  std::vector<char> on_crack(mesh.nodes.size(), 0);
  for (const auto& [k, _] : is_crack) {
    on_crack[static_cast<std::size_t>(k >> 32)] = 1;
    on_crack[static_cast<std::size_t>(k & 0xffffffffu)] = 1;
  }
  const std::size_t n_geom = mesh.nodes.size();
  for (std::size_t v = 0; v < n_geom; ++v) {
    if (!on_crack[v]) continue;
    const auto& tris = vert_tris[v];
    std::vector<int> group(tris.size());
    std::iota(group.begin(), group.end(), 0);
    std::function<int(int)> find = [&](int x) { return group[x] == x ? x : group[x] = find(group[x]); };
    for (std::size_t i = 0; i < tris.size(); ++i) {
      for (std::size_t j = i + 1; j < tris.size(); ++j) {
        const auto& ti = mesh.triangles[tris[i]];
        const auto& tj = mesh.triangles[tris[j]];
        for (int a = 0; a < 3; ++a) {
          int w = ti[a];
          if (w == static_cast<int>(v)) continue;
          if (std::find(tj.begin(), tj.end(), w) == tj.end()) continue;
          if (is_crack.count(edge_key(static_cast<int>(v), w))) continue;
          group[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
      }
    }
    std::map<int, int> copy_of_group;  // root -> node id
    for (std::size_t i = 0; i < tris.size(); ++i) {
      int root = find(static_cast<int>(i));
      if (copy_of_group.empty()) copy_of_group[root] = static_cast<int>(v);
      if (!copy_of_group.count(root)) {
        int nid = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(mesh.nodes[v]);
        mesh.vertex_of.push_back(static_cast<int>(v));
        mesh.duplicates.push_back({static_cast<int>(v), nid});
        copy_of_group[root] = nid;
      }
      int node = copy_of_group[root];
      for (auto& x : mesh.triangles[tris[i]])
        if (x == static_cast<int>(v)) x = node;
    }
  }

  // refresh edge node ids from their owning triangles
  auto refresh = [&](MeshEdge& e) {
    const auto& tr = mesh.triangles[e.tri];
    int a = -1, b = -1;
    for (int x : tr) {
      if (mesh.vertex_of[x] == e.a) a = x;
      if (mesh.vertex_of[x] == e.b) b = x;
    }
    e.a = a;
    e.b = b;
  };
  for (auto& e : mesh.boundary_edges) refresh(e);
  for (auto& e : mesh.crack_edges) refresh(e);

  mesh.dirichlet.assign(mesh.nodes.size(), 0);
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    if (mesh.boundary_kind[i] != EdgeKind::Dirichlet) continue;
    mesh.dirichlet[mesh.boundary_edges[i].a] = 1;
    mesh.dirichlet[mesh.boundary_edges[i].b] = 1;
  }

  mesh.tip_nodes.assign(crack.M(), -1);
  for (std::size_t m = 0; m < crack.M(); ++m) {
    const Vec2& tip = cracks[m].back();
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
      if ((mesh.nodes[n] - tip).norm() <= 1e-12 * diam) {
        mesh.tip_nodes[m] = static_cast<int>(n);
        break;
      }
  }
  return mesh;
}

}  // namespace vvfrac
