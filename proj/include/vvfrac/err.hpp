#pragma once

#include "vvfrac/fem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vvfrac {

// Radial cutoff: 1 on [0, r_in], C1 cubic ramp to 0 at r.
double cutoff(double d, double r_in, double r);
double cutoff_derivative(double d, double r_in, double r);

// P1 velocity field rho = phi(|x - tip|) * dir(x) with dir the tip tangent, or,
// when `curvature` is nonzero, the rotation about the center of the osculating
// circle (unit speed at the tip) so that the field slides an arc along itself.
struct VelocityField {
  Vec2 tip = Vec2::Zero();
  Vec2 tangent = Vec2::UnitX();
  double r = 0.0;
  double r_in = 0.0;
  double curvature = 0.0;
  std::size_t component = 0;
  std::vector<Vec2> nodal;  // one value per mesh node

  // Gradient (d rho_i / d x_j) on triangle t.
  Mat2 gradient(const CrackedMesh& mesh, std::size_t t) const;
  Vec2 centroid_value(const CrackedMesh& mesh, std::size_t t) const;
};

// Feasibility limits of the cutoff radius at tip m.
struct RadiusLimits {
  double boundary_distance = 0.0;
  double other_distance = 0.0;
  double local_size = 0.0;  // longest edge around the tip node
  double cap() const;       // largest radius whose disk avoids boundary and other components
  double floor() const { return 4.0 * local_size; }
};
RadiusLimits radius_limits(const CrackedMesh& mesh, const CrackSet& crack, std::size_t m,
                           const Polygon& domain);

// 0.9 * min(boundary distance, other-component distance, 2 eta), raised to 4
// local element sizes. Throws InfeasibleRadiusError when that floor exceeds the cap.
double default_radius(const CrackedMesh& mesh, const CrackSet& crack, std::size_t m,
                      const Polygon& domain);

// Builds the field for tip m with cutoff radius r and plateau r/2. Throws
// InfeasibleRadiusError if the disk reaches the boundary (and with it the
// support of w) or another component, or if r is below 4 local element sizes.
VelocityField build_velocity_field(const CrackedMesh& mesh, const CrackSet& crack, std::size_t m,
                                   double r, const Polygon& domain, double curvature = 0.0,
                                   Vec2 tangent_override = Vec2::Zero());

// Signed contributions to G; their sum is G.
struct ErrEntry {
  std::size_t tip = 0;
  double G = 0.0;
  double material_term = 0.0;    // -1/2 int (DC rho) grad u : grad u
  double convection_term = 0.0;  // + int C grad u grad rho : grad u
  double dilation_term = 0.0;    // -1/2 int C grad u : grad u div rho
  double force_term = 0.0;       // - int f . grad u rho
  double radius = 0.0;
  bool feasible = true;
  std::string note;
};

// G = -dE/dsigma evaluated by the domain integral with the given field.
// Gradients of lambda and mu are analytic; `fd_material_gradient` switches to
// central differences with step equal to the element size.
ErrEntry energy_release_rate(const DisplacementField& u, const MaterialModel& material,
                             const LoadTrajectory& loads, double t, const CrackSet& crack,
                             std::size_t m, const VelocityField& velocity,
                             bool fd_material_gradient = false);

// Domain integral with an arbitrary nodal field, without checking that the
// field belongs to a particular tip. On a mesh moved by s * nodal this equals
// -dE_h/ds at s = 0 when f = 0.
ErrEntry domain_integral(const DisplacementField& u, const MaterialModel& material,
                         const LoadTrajectory& loads, double t,
                         const std::vector<Vec2>& nodal, bool fd_material_gradient = false);

// All tips with default radii. Tips without a feasible radius are flagged.
std::vector<ErrEntry> err_vector(const DisplacementField& u, const MaterialModel& material,
                                 const LoadTrajectory& loads, double t, const CrackSet& crack,
                                 const Polygon& domain);

struct SensitivityReport {
  std::vector<double> radii;
  std::vector<double> G_by_radius;
  std::vector<double> G_by_tilt;  // plateau directions tangent +- tilt * normal
  double radius_spread = 0.0;     // (max - min) / max(|G|, tiny) over radii
  double tilt_spread = 0.0;
  double spread = 0.0;            // max of the two
};

SensitivityReport extension_independence_check(const DisplacementField& u,
                                               const MaterialModel& material,
                                               const LoadTrajectory& loads, double t,
                                               const CrackSet& crack, std::size_t m,
                                               const std::vector<double>& radii,
                                               const Polygon& domain, double tilt = 0.02);

// Central difference of the elastic energy over tangent extensions of tip m by
// +-delta. The extension is realized by moving the mesh with delta times a
// velocity field of radius `radius_fraction` times the default radius, so the
// two solves share one topology. With `remesh` set, the difference is also
// taken between two independently meshed cracks (noisier, diagnostic only).
struct FdOracle {
  double delta = 0.0;
  double G_fd = 0.0;
  double E_plus = 0.0;
  double E_minus = 0.0;
  double G_fd_remesh = 0.0;
  bool has_remesh = false;
};
FdOracle finite_difference_err(const DomainSpec& domain, const MaterialModel& material,
                               const LoadTrajectory& loads, double t, const CrackSet& crack,
                               std::size_t m, const MeshOptions& mesh_options, double delta,
                               double radius_fraction = 0.6, bool remesh = false,
                               SolverOptions solver = {});

}  // namespace vvfrac
