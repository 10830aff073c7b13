#include "vvfrac/err.hpp"

#include "vvfrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vvfrac {

double cutoff(double d, double r_in, double r) {
  if (d <= r_in) return 1.0;
  if (d >= r) return 0.0;
  double s = (d - r_in) / (r - r_in);
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

double cutoff_derivative(double d, double r_in, double r) {
  if (d <= r_in || d >= r) return 0.0;
  double s = (d - r_in) / (r - r_in);
  return -6.0 * s * (1.0 - s) / (r - r_in);
}

Mat2 VelocityField::gradient(const CrackedMesh& mesh, std::size_t t) const {
  ElementGeometry g = element_geometry(mesh, t);
  Mat2 G = Mat2::Zero();
  const auto& tr = mesh.triangles[t];
  for (int i = 0; i < 3; ++i) G += nodal[tr[i]] * g.grad.row(i);
  return G;
}

Vec2 VelocityField::centroid_value(const CrackedMesh& mesh, std::size_t t) const {
  const auto& tr = mesh.triangles[t];
  return (nodal[tr[0]] + nodal[tr[1]] + nodal[tr[2]]) / 3.0;
}

double RadiusLimits::cap() const { return std::min(boundary_distance, other_distance); }

RadiusLimits radius_limits(const CrackedMesh& mesh, const CrackSet& crack, std::size_t m,
                           const Polygon& domain) {
  if (m >= crack.M()) throw InvalidArgument("unknown tip index " + std::to_string(m));
  if (m >= mesh.tip_nodes.size() || mesh.tip_nodes[m] < 0)
    throw StructuralError("mesh has no tip node for component " + std::to_string(m));
  RadiusLimits lim;
  const Vec2& tip = crack.components[m].tip();
  lim.boundary_distance = domain.boundary_distance(tip);
  lim.other_distance = tip_distance_to_others(crack, m);
  lim.local_size = mesh.local_size(mesh.tip_nodes[m]);
  return lim;
}

double default_radius(const CrackedMesh& mesh, const CrackSet& crack, std::size_t m,
                      const Polygon& domain) {
  RadiusLimits lim = radius_limits(mesh, crack, m, domain);
  double r = 0.9 * std::min({lim.boundary_distance, lim.other_distance, 2.0 * crack.eta});
  if (lim.floor() >= lim.cap()) {
    std::ostringstream os;
    os << "tip too close to boundary/other crack: tip " << m << " needs radius "
       << lim.floor() << " but only " << lim.cap() << " is available";
    throw InfeasibleRadiusError(os.str());
  }
  return std::max(r, lim.floor());
}

VelocityField build_velocity_field(const CrackedMesh& mesh, const CrackSet& crack, std::size_t m,
                                   double r, const Polygon& domain, double curvature,
                                   Vec2 tangent_override) {
  RadiusLimits lim = radius_limits(mesh, crack, m, domain);
  if (!(r < lim.cap())) {
    std::ostringstream os;
    os << "tip too close to boundary/other crack: radius " << r << " at tip " << m
       << " reaches the boundary or another component (limit " << lim.cap() << ")";
    throw InfeasibleRadiusError(os.str());
  }
  if (r < lim.floor() * (1.0 - 1e-9)) {
    std::ostringstream os;
    os << "radius " << r << " at tip " << m << " is below 4 local element sizes ("
       << lim.floor() << ")";
    throw InfeasibleRadiusError(os.str());
  }
  VelocityField v;
  v.component = m;
  auto [tip, tangent] = tip_and_tangent(crack, m);
  v.tip = tip;
  v.tangent = tangent_override.norm() > 0.0 ? Vec2(tangent_override.normalized()) : tangent;
  v.r = r;
  v.r_in = 0.5 * r;
  v.curvature = curvature;
  v.nodal.assign(mesh.num_nodes(), Vec2::Zero());
  Vec2 center = tip + perp(v.tangent) / (curvature == 0.0 ? 1.0 : curvature);
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
    double d = (mesh.nodes[n] - tip).norm();
    if (d >= r) continue;
    double phi = cutoff(d, v.r_in, r);
    Vec2 dir = curvature == 0.0 ? v.tangent : Vec2(curvature * perp(mesh.nodes[n] - center));
    v.nodal[n] = phi * dir;
  }
  return v;
}

ErrEntry energy_release_rate(const DisplacementField& u, const MaterialModel& material,
                             const LoadTrajectory& loads, double t, const CrackSet& crack,
                             std::size_t m, const VelocityField& velocity,
                             bool fd_material_gradient) {
  const CrackedMesh& mesh = *u.mesh;
  if (m >= crack.M()) throw InvalidArgument("unknown tip index " + std::to_string(m));
  if (velocity.component != m || (velocity.tip - crack.components[m].tip()).norm() > 1e-9 ||
      velocity.nodal.size() != mesh.num_nodes())
    throw InvalidArgument("velocity field does not belong to tip " + std::to_string(m));

  ErrEntry e = domain_integral(u, material, loads, t, velocity.nodal, fd_material_gradient);
  e.tip = m;
  e.radius = velocity.r;
  return e;
}

ErrEntry domain_integral(const DisplacementField& u, const MaterialModel& material,
                         const LoadTrajectory& loads, double t,
                         const std::vector<Vec2>& nodal, bool fd_material_gradient) {
  const CrackedMesh& mesh = *u.mesh;
  if (nodal.size() != mesh.num_nodes())
    throw InvalidArgument("velocity field does not match the mesh");
  ErrEntry e;
  const bool body = loads.has_body_force() && loads.f_amp.at(t) != 0.0;
  double mat = 0.0, conv = 0.0, dil = 0.0, force = 0.0;
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    const auto& tr = mesh.triangles[k];
    if (nodal[tr[0]].isZero() && nodal[tr[1]].isZero() &&
        nodal[tr[2]].isZero())
      continue;
    ElementGeometry g = element_geometry(mesh, k);
    Mat2 Gu = Mat2::Zero(), Gv = Mat2::Zero();
    for (int i = 0; i < 3; ++i) {
      Gu += u.at(tr[i]) * g.grad.row(i);
      Gv += nodal[tr[i]] * g.grad.row(i);
    }
    Mat2 E = 0.5 * (Gu + Gu.transpose());
    double lambda = material.lambda(g.centroid), mu = material.mu(g.centroid);
    double trE = E.trace();
    Mat2 S = lambda * trE * Mat2::Identity() + 2.0 * mu * E;
    double W = 0.5 * (S.array() * E.array()).sum();
    Vec2 rho = (nodal[tr[0]] + nodal[tr[1]] + nodal[tr[2]]) / 3.0;

    Vec2 dl, dm;
    if (fd_material_gradient) {
      double hs = std::sqrt(2.0 * g.area);
      Vec2 ex(hs, 0.0), ey(0.0, hs);
      dl = Vec2(material.lambda(g.centroid + ex) - material.lambda(g.centroid - ex),
                material.lambda(g.centroid + ey) - material.lambda(g.centroid - ey)) / (2 * hs);
      dm = Vec2(material.mu(g.centroid + ex) - material.mu(g.centroid - ex),
                material.mu(g.centroid + ey) - material.mu(g.centroid - ey)) / (2 * hs);
    } else {
      dl = material.lambda.gradient(g.centroid);
      dm = material.mu.gradient(g.centroid);
    }
    double mat_density = 0.5 * (dl.dot(rho) * trE * trE + 2.0 * dm.dot(rho) * (E.array() * E.array()).sum());
    double conv_density = (S.array() * (Gu * Gv).array()).sum();
    double dil_density = W * Gv.trace();
    double force_density = 0.0;
    if (body) {
      for (int i = 0; i < 3; ++i) {
        int a = tr[i], b = tr[(i + 1) % 3];
        Vec2 q = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
        Vec2 rq = 0.5 * (nodal[a] + nodal[b]);
        force_density += loads.f(q, t).dot(Gu * rq) / 3.0;
      }
    }
    mat += g.area * mat_density;
    conv += g.area * conv_density;
    dil += g.area * dil_density;
    force += g.area * force_density;
  }
  // dE/dsigma = mat - conv + dil + force and G = -dE/dsigma
  e.material_term = -mat;
  e.convection_term = conv;
  e.dilation_term = -dil;
  e.force_term = -force;
  e.G = e.material_term + e.convection_term + e.dilation_term + e.force_term;
  return e;
}

std::vector<ErrEntry> err_vector(const DisplacementField& u, const MaterialModel& material,
                                 const LoadTrajectory& loads, double t, const CrackSet& crack,
                                 const Polygon& domain) {
  std::vector<ErrEntry> out;
  for (std::size_t m = 0; m < crack.M(); ++m) {
    try {
      double r = default_radius(*u.mesh, crack, m, domain);
      auto v = build_velocity_field(*u.mesh, crack, m, r, domain);
      out.push_back(energy_release_rate(u, material, loads, t, crack, m, v));
    } catch (const InfeasibleRadiusError& ex) {
      ErrEntry e;
      e.tip = m;
      e.G = std::numeric_limits<double>::quiet_NaN();
      e.feasible = false;
      e.note = ex.what();
      out.push_back(e);
    }
  }
  return out;
}

SensitivityReport extension_independence_check(const DisplacementField& u,
                                               const MaterialModel& material,
                                               const LoadTrajectory& loads, double t,
                                               const CrackSet& crack, std::size_t m,
                                               const std::vector<double>& radii,
                                               const Polygon& domain, double tilt) {
  if (radii.size() < 2) throw InvalidArgument("need at least two radii");
  SensitivityReport rep;
  rep.radii = radii;
  for (double r : radii) {
    auto v = build_velocity_field(*u.mesh, crack, m, r, domain);
    rep.G_by_radius.push_back(energy_release_rate(u, material, loads, t, crack, m, v).G);
  }
  auto [tip, tangent] = tip_and_tangent(crack, m);
  for (double s : {-1.0, 1.0}) {
    Vec2 dir = tangent + s * tilt * perp(tangent);
    auto v = build_velocity_field(*u.mesh, crack, m, radii[0], domain, 0.0, dir);
    rep.G_by_tilt.push_back(energy_release_rate(u, material, loads, t, crack, m, v).G);
  }
  auto spread = [&](const std::vector<double>& g) {
    double ref = std::abs(rep.G_by_radius[0]);
    auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    double d = std::max(*hi, rep.G_by_radius[0]) - std::min(*lo, rep.G_by_radius[0]);
    if (d == 0.0) return 0.0;
    return d / std::max(ref, std::numeric_limits<double>::min());
  };
  rep.radius_spread = spread(rep.G_by_radius);
  rep.tilt_spread = spread(rep.G_by_tilt);
  rep.spread = std::max(rep.radius_spread, rep.tilt_spread);
  return rep;
}

FdOracle finite_difference_err(const DomainSpec& domain, const MaterialModel& material,
                               const LoadTrajectory& loads, double t, const CrackSet& crack,
                               std::size_t m, const MeshOptions& mesh_options, double delta,
                               double radius_fraction, bool remesh, SolverOptions solver) {
  if (m >= crack.M()) throw InvalidArgument("unknown tip index " + std::to_string(m));
  if (!(delta > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  FdOracle fd;
  fd.delta = delta;
  CrackedMesh mesh = build_mesh(domain, crack, mesh_options);
  double r = radius_fraction * default_radius(mesh, crack, m, domain.polygon);
  VelocityField v = build_velocity_field(mesh, crack, m, r, domain.polygon);
  auto energy = [&](const CrackedMesh& mm) {
    ElasticitySolver s(mm, material, solver);
    DisplacementField u = s.solve(loads, t);
    return s.functional(u.u, loads, t);
  };
  for (double sgn : {1.0, -1.0}) {
    std::vector<Vec2> disp(mesh.num_nodes());
    for (std::size_t n = 0; n < disp.size(); ++n) disp[n] = sgn * delta * v.nodal[n];
    (sgn > 0 ? fd.E_plus : fd.E_minus) = energy(mesh.morphed(disp));
  }
  fd.G_fd = (fd.E_minus - fd.E_plus) / (2.0 * delta);
  if (remesh) {
    double E[2];
    for (int k = 0; k < 2; ++k) {
      CrackSet c = crack;
      auto& comp = c.components[m];
      std::vector<Vec2> pts = comp.vertices;
      Vec2 tangent = comp.tip_tangent;
      pts.back() += (k == 0 ? delta : -delta) * tangent;
      c.components[m] = CrackComponent::from_vertices(pts, comp.origin_kind, comp.frozen_prefix_len);
      E[k] = energy(build_mesh(domain, c, mesh_options));
    }
    fd.G_fd_remesh = (E[1] - E[0]) / (2.0 * delta);
    fd.has_remesh = true;
  }
  return fd;
}

}  // namespace vvfrac
