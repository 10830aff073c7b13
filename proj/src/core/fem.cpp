#include "vvfrac/fem.hpp"

#include "vvfrac/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>

namespace vvfrac {

struct ElasticitySolver::Factorization {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> direct;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
};

ElementGeometry element_geometry(const CrackedMesh& mesh, std::size_t t) {
  const auto& tr = mesh.triangles[t];
  const Vec2& a = mesh.nodes[tr[0]];
  const Vec2& b = mesh.nodes[tr[1]];
  const Vec2& c = mesh.nodes[tr[2]];
  double det = orient2d(a, b, c);
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad.row(0) = Vec2(b.y() - c.y(), c.x() - b.x()).transpose() / det;
  g.grad.row(1) = Vec2(c.y() - a.y(), a.x() - c.x()).transpose() / det;
  g.grad.row(2) = Vec2(a.y() - b.y(), b.x() - a.x()).transpose() / det;
  g.centroid = (a + b + c) / 3.0;
  return g;
}

Mat2 DisplacementField::gradient(std::size_t tri) const {
  ElementGeometry g = element_geometry(*mesh, tri);
  Mat2 G = Mat2::Zero();
  const auto& tr = mesh->triangles[tri];
  for (int i = 0; i < 3; ++i) G += at(tr[i]) * g.grad.row(i);
  return G;
}

namespace {

using Triplet = Eigen::Triplet<double>;

// 6x6 element stiffness for plane strain with constant Lame parameters.
Eigen::Matrix<double, 6, 6> element_stiffness(const ElementGeometry& g, double lambda, double mu) {
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    double dx = g.grad(i, 0), dy = g.grad(i, 1);
    B(0, 2 * i) = dx;
    B(1, 2 * i + 1) = dy;
    B(2, 2 * i) = dy;
    B(2, 2 * i + 1) = dx;
  }
  Eigen::Matrix3d D;
  D << lambda + 2 * mu, lambda, 0, lambda, lambda + 2 * mu, 0, 0, 0, mu;
  return g.area * B.transpose() * D * B;
}

}  // namespace

ElasticitySolver::ElasticitySolver(const CrackedMesh& mesh, const MaterialModel& material,
                                   SolverOptions options)
    : mesh_(&mesh), material_(&material), options_(options), fact_(new Factorization) {
  const int n = static_cast<int>(2 * mesh.num_nodes());
  std::vector<Triplet> trip;
  trip.reserve(36 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    if (!(g.area > 0.0)) throw StructuralError("mesh has a non-positive triangle");
    double lambda = material.lambda(g.centroid), mu = material.mu(g.centroid);
    auto Ke = element_stiffness(g, lambda, mu);
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 2; ++a)
        for (int j = 0; j < 3; ++j)
          for (int b = 0; b < 2; ++b)
            trip.emplace_back(2 * tr[i] + a, 2 * tr[j] + b, Ke(2 * i + a, 2 * j + b));
  }
  K_.resize(n, n);
  K_.setFromTriplets(trip.begin(), trip.end());

  fixed_.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v)
    if (mesh.dirichlet[v]) fixed_[2 * v] = fixed_[2 * v + 1] = 1;
  dof_to_free_.assign(static_cast<std::size_t>(n), -1);
  for (int d = 0; d < n; ++d) {
    if (fixed_[d]) {
      fixed_list_.push_back(d);
    } else {
      dof_to_free_[d] = static_cast<int>(free_.size());
      free_.push_back(d);
    }
  }
  if (fixed_list_.empty()) throw SolverError("insufficient Dirichlet data");

  std::vector<int> dof_to_fixed(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < fixed_list_.size(); ++k) dof_to_fixed[fixed_list_[k]] = static_cast<int>(k);
  std::vector<Triplet> tff, tfd;
  for (int col = 0; col < K_.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K_, col); it; ++it) {
      int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (fixed_[r]) continue;
      if (fixed_[c])
        tfd.emplace_back(dof_to_free_[r], dof_to_fixed[c], it.value());
      else
        tff.emplace_back(dof_to_free_[r], dof_to_free_[c], it.value());
    }
  }
  Kff_.resize(static_cast<int>(free_.size()), static_cast<int>(free_.size()));
  Kff_.setFromTriplets(tff.begin(), tff.end());
  Kfd_.resize(static_cast<int>(free_.size()), static_cast<int>(fixed_list_.size()));
  Kfd_.setFromTriplets(tfd.begin(), tfd.end());

  if (options_.iterative) {
    fact_->cg.setTolerance(options_.rtol);
    fact_->cg.setMaxIterations(20 * static_cast<int>(free_.size()) + 100);
    fact_->cg.compute(Kff_);
  } else {
    fact_->direct.compute(Kff_);
    if (fact_->direct.info() != Eigen::Success)
      throw SolverError("stiffness factorization failed (floating part or insufficient Dirichlet data)");
    auto D = fact_->direct.vectorD();
    double dmax = D.cwiseAbs().maxCoeff();
    if (!(D.minCoeff() > 1e-14 * dmax))
      throw SolverError("singular stiffness: insufficient Dirichlet data for some part of the body");
  }
}

ElasticitySolver::~ElasticitySolver() = default;

Eigen::VectorXd ElasticitySolver::load_vector(const LoadTrajectory& loads, double t) const {
  const auto& mesh = *mesh_;
  Eigen::VectorXd F = Eigen::VectorXd::Zero(static_cast<int>(2 * mesh.num_nodes()));
  if (loads.has_body_force() && loads.f_amp.at(t) != 0.0) {
    for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
      const auto& tr = mesh.triangles[e];
      double A = mesh.triangle_area(e);
      // edge-midpoint rule: exact for quadratics
      for (int k = 0; k < 3; ++k) {
        int i = tr[k], j = tr[(k + 1) % 3];
        Vec2 q = 0.5 * (mesh.nodes[i] + mesh.nodes[j]);
        Vec2 f = loads.f(q, t) * (A / 3.0) * 0.5;
        F.segment<2>(2 * i) += f;
        F.segment<2>(2 * j) += f;
      }
    }
  }
  if (loads.has_traction() && loads.g_amp.at(t) != 0.0) {
    const double gp = 0.5 / std::sqrt(3.0);
    for (std::size_t k = 0; k < mesh.boundary_edges.size(); ++k) {
      if (mesh.boundary_kind[k] != EdgeKind::Traction) continue;
      const auto& e = mesh.boundary_edges[k];
      Vec2 a = mesh.nodes[e.a], b = mesh.nodes[e.b];
      double L = (b - a).norm();
      for (double s : {0.5 - gp, 0.5 + gp}) {
        Vec2 g = loads.g((1 - s) * a + s * b, t) * (0.5 * L);
        F.segment<2>(2 * e.a) += (1 - s) * g;
        F.segment<2>(2 * e.b) += s * g;
      }
    }
  }
  return F;
}

Eigen::VectorXd ElasticitySolver::dirichlet_lift(const LoadTrajectory& loads, double t) const {
  const auto& mesh = *mesh_;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<int>(2 * mesh.num_nodes()));
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v)
    if (mesh.dirichlet[v]) w.segment<2>(2 * static_cast<int>(v)) = loads.w(mesh.nodes[v], t);
  return w;
}

DisplacementField ElasticitySolver::solve(const LoadTrajectory& loads, double t) const {
  DisplacementField out;
  out.mesh = mesh_;
  out.t = t;
  Eigen::VectorXd F = load_vector(loads, t);
  Eigen::VectorXd w = dirichlet_lift(loads, t);
  Eigen::VectorXd wd(static_cast<int>(fixed_list_.size()));
  for (std::size_t k = 0; k < fixed_list_.size(); ++k) wd[static_cast<int>(k)] = w[fixed_list_[k]];
  Eigen::VectorXd rhs(static_cast<int>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) rhs[static_cast<int>(k)] = F[free_[k]];
  rhs -= Kfd_ * wd;
  Eigen::VectorXd uf;
  if (rhs.norm() == 0.0) {
    uf = Eigen::VectorXd::Zero(rhs.size());
  } else if (options_.iterative) {
    uf = fact_->cg.solve(rhs);
    if (fact_->cg.info() != Eigen::Success) throw SolverError("conjugate gradients did not converge");
  } else {
    uf = fact_->direct.solve(rhs);
    // one step of iterative refinement
    Eigen::VectorXd r = rhs - Kff_ * uf;
    uf += fact_->direct.solve(r);
  }
  double rn = rhs.norm();
  out.residual = rn > 0.0 ? (rhs - Kff_ * uf).norm() / rn : 0.0;
  if (!(out.residual <= std::max(options_.rtol, 1e-9)))
    throw SolverError("equilibrium residual above tolerance");
  out.u = w;
  for (std::size_t k = 0; k < free_.size(); ++k) out.u[free_[k]] = uf[static_cast<int>(k)];
  out.dirichlet_values = w;
  return out;
}

double ElasticitySolver::functional(const Eigen::VectorXd& v, const LoadTrajectory& loads,
                                    double t) const {
  return 0.5 * v.dot(K_ * v) - load_vector(loads, t).dot(v);
}

EnergyReport ElasticitySolver::energies(const DisplacementField& u, const LoadTrajectory& loads,
                                        double t, const CrackSet& crack) const {
  if (u.mesh != mesh_ || u.u.size() != K_.rows())
    throw StructuralError("displacement field does not belong to this mesh");
  for (std::size_t m = 0; m < crack.M() && m < mesh_->tip_nodes.size(); ++m) {
    int tn = mesh_->tip_nodes[m];
    if (tn < 0 || (mesh_->nodes[tn] - crack.components[m].tip()).norm() > 1e-9 * std::max(1.0, mesh_->h))
      throw StructuralError("mesh does not match the crack geometry");
  }
  if (crack.M() != mesh_->tip_nodes.size())
    throw StructuralError("mesh does not match the crack geometry");
  EnergyReport r;
  r.strain = strain_energy(u.u);
  Eigen::VectorXd F = load_vector(loads, t);
  // split the load work into body and traction parts
  LoadTrajectory body = loads, trac = loads;
  body.g_profile = VectorField{};
  trac.f_profile = VectorField{};
  r.body_work = loads.has_body_force() ? load_vector(body, t).dot(u.u) : 0.0;
  r.traction_work = loads.has_traction() ? load_vector(trac, t).dot(u.u) : 0.0;
  r.elastic = r.strain - r.body_work - r.traction_work;
  r.surface = surface_energy(crack, *material_);
  r.total = r.elastic + r.surface;
  return r;
}

bool ElasticitySolver::test_function_energy_bound(const DisplacementField& u,
                                                  const Eigen::VectorXd& v,
                                                  const LoadTrajectory& loads, double t) const {
  if (v.size() != u.u.size()) throw InvalidArgument("test field has the wrong size");
  for (int d : fixed_list_)
    if (std::abs(v[d] - u.dirichlet_values[d]) > 1e-12 * (1.0 + std::abs(u.dirichlet_values[d])))
      throw InvalidArgument("test field does not match the boundary datum");
  double fu = functional(u.u, loads, t);
  double fv = functional(v, loads, t);
  double scale = std::max({std::abs(fu), strain_energy(u.u), 1e-300});
  return fv >= fu - 1e-10 * scale;
}

DisplacementField solve_equilibrium(const CrackedMesh& mesh, const MaterialModel& material,
                                    const LoadTrajectory& loads, double t, SolverOptions options) {
  ElasticitySolver s(mesh, material, options);
  return s.solve(loads, t);
}

double surface_energy(const CrackSet& crack, const MaterialModel& material) {
  static const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double K = 0.0;
  for (const auto& c : crack.components) {
    for (std::size_t i = 1; i < c.vertices.size(); ++i) {
      const Vec2& a = c.vertices[i - 1];
      const Vec2& b = c.vertices[i];
      double L = (b - a).norm();
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += w[k] * material.kappa(a + 0.5 * (1.0 + x[k]) * (b - a));
      K += 0.5 * L * s;
    }
  }
  return K;
}

}  // namespace vvfrac
