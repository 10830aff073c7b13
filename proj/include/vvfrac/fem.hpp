#pragma once

#include "vvfrac/crack.hpp"
#include "vvfrac/mesh.hpp"
#include "vvfrac/model.hpp"

#include <Eigen/Sparse>
#include <memory>

namespace vvfrac {

struct SolverOptions {
  bool iterative = false;  // conjugate gradients with a diagonal preconditioner
  double rtol = 1e-10;
};

// Nodal displacement, two components per node (x then y).
struct DisplacementField {
  const CrackedMesh* mesh = nullptr;
  double t = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd dirichlet_values;  // w(t) on Dirichlet dofs, zero elsewhere
  double residual = 0.0;             // relative residual of the reduced system

  Vec2 at(int node) const { return {u[2 * node], u[2 * node + 1]}; }
  // Displacement gradient on triangle tri (constant for P1).
  Mat2 gradient(std::size_t tri) const;
};

struct EnergyReport {
  double strain = 0.0;         // 1/2 int C Eu : Eu
  double body_work = 0.0;      // int f . u
  double traction_work = 0.0;  // int_S g . u
  double elastic = 0.0;        // strain - body_work - traction_work
  double surface = 0.0;        // sum over components of int kappa
  double total = 0.0;          // elastic + surface
};

// Per-triangle P1 data on a fixed mesh.
struct ElementGeometry {
  double area = 0.0;
  Eigen::Matrix<double, 3, 2> grad;  // gradients of the three hat functions
  Vec2 centroid;
};
ElementGeometry element_geometry(const CrackedMesh& mesh, std::size_t t);

// Assembled linear elasticity on one mesh. The reduced stiffness is factorized
// once; solves at different times reuse it.
class ElasticitySolver {
 public:
  ElasticitySolver(const CrackedMesh& mesh, const MaterialModel& material,
                   SolverOptions options = {});
  ~ElasticitySolver();
  ElasticitySolver(const ElasticitySolver&) = delete;
  ElasticitySolver& operator=(const ElasticitySolver&) = delete;

  const CrackedMesh& mesh() const { return *mesh_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }

  DisplacementField solve(const LoadTrajectory& loads, double t) const;

  // Nodal load vector (body force and traction) at time t.
  Eigen::VectorXd load_vector(const LoadTrajectory& loads, double t) const;
  // Dirichlet values w(t) on Dirichlet dofs, zero elsewhere.
  Eigen::VectorXd dirichlet_lift(const LoadTrajectory& loads, double t) const;

  // 1/2 v'Kv - F(t)'v for any nodal field v.
  double functional(const Eigen::VectorXd& v, const LoadTrajectory& loads, double t) const;
  double strain_energy(const Eigen::VectorXd& v) const { return 0.5 * v.dot(K_ * v); }
  double bilinear(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(K_ * b);
  }

  EnergyReport energies(const DisplacementField& u, const LoadTrajectory& loads, double t,
                        const CrackSet& crack) const;

  // True when functional(v) >= functional(u) - 1e-10 * scale. Throws
  // InvalidArgument if v does not match w(t) on the Dirichlet nodes.
  bool test_function_energy_bound(const DisplacementField& u, const Eigen::VectorXd& v,
                                  const LoadTrajectory& loads, double t) const;

  const std::vector<int>& free_dofs() const { return free_; }
  const std::vector<char>& dof_is_dirichlet() const { return fixed_; }

 private:
  struct Factorization;
  const CrackedMesh* mesh_;
  const MaterialModel* material_;
  SolverOptions options_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SparseMatrix<double> Kff_;
  Eigen::SparseMatrix<double> Kfd_;
  std::vector<int> free_;
  std::vector<int> fixed_list_;
  std::vector<char> fixed_;
  std::vector<int> dof_to_free_;
  std::unique_ptr<Factorization> fact_;
};

// Convenience wrapper building a solver for a single solve.
DisplacementField solve_equilibrium(const CrackedMesh& mesh, const MaterialModel& material,
                                    const LoadTrajectory& loads, double t,
                                    SolverOptions options = {});

// K(Gamma) = sum_m int_{Gamma^m} kappa dH1, three-point Gauss per segment.
double surface_energy(const CrackSet& crack, const MaterialModel& material);

}  // namespace vvfrac
