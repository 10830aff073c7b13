#pragma once

#include "vvfrac/crack.hpp"
#include "vvfrac/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace vvfrac {

struct MeshEdge {
  int a = 0;
  int b = 0;
  int tri = 0;   // owning triangle
  int owner = 0;  // polygon edge (boundary) or crack component (crack faces)
};

// Triangulation of the cracked body. Crack faces are realized by node
// duplication: nodes on the crack carry one copy per side, and the tip keeps a
// single node.
struct CrackedMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> vertex_of;                 // geometric vertex of each node
  std::vector<MeshEdge> boundary_edges;       // on the polygon, oriented with the domain
  std::vector<MeshEdge> crack_edges;          // one entry per face side
  std::vector<EdgeKind> boundary_kind;        // per boundary edge
  std::vector<char> dirichlet;                // per node
  std::vector<std::array<int, 2>> duplicates;  // (node, copy) pairs sharing a location
  std::vector<int> tip_nodes;                 // per crack component, -1 when not meshed
  double h = 0.0;
  double grading = 1.0;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;
  // Longest edge among the triangles around node n.
  double local_size(int n) const;
  double min_area() const;

  // Copy with every node moved by `displacement`. Throws MeshingError if a
  // triangle degenerates or flips.
  CrackedMesh morphed(const std::vector<Vec2>& displacement) const;

  // Gmsh 2.2 ASCII with physical tags 1 (body), 11 free, 12 Dirichlet,
  // 13 traction boundary lines, 20 crack faces.
  std::string to_msh() const;
};

struct MeshOptions {
  double h = 0.1;
  double tip_grading = 8.0;
  // Radius, in multiples of h, over which the size grows from h/grading to h.
  double grading_rings = 4.0;
  double quality = 1.41421356237;
};

// Target edge length at p: h / grading at each tip, growing geometrically to h.
double mesh_size_at(const Vec2& p, const CrackSet& crack, const MeshOptions& opt);

CrackedMesh build_mesh(const DomainSpec& domain, const CrackSet& crack, const MeshOptions& opt);
CrackedMesh build_mesh(const DomainSpec& domain, const CrackSet& crack, double h,
                       double tip_grading);

}  // namespace vvfrac
