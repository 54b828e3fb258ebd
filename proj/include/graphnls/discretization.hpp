#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include "graphnls/mesh.hpp"

namespace graphnls {

/// P1 finite-element matrices over the global unknowns. Vertex-node sharing
/// makes Kirchhoff coupling natural; Dirichlet caps are simply excluded.
struct Operators {
  Eigen::SparseMatrix<double> stiffness;  // symmetric PSD, \int u'v'
  Eigen::SparseMatrix<double> mass;       // symmetric PD, \int uv
};

Operators assemble(const Mesh& mesh);

/// Immutable mesh + operators bundle, shared read-only by grid functions.
struct Discretization {
  Mesh mesh;
  Operators ops;
  // Cholesky factor of the mass matrix, shared by Riesz solves.
  std::shared_ptr<const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> mass_solver;
};
using DiscPtr = std::shared_ptr<const Discretization>;

DiscPtr make_discretization(Mesh mesh);
DiscPtr make_discretization(const MetricGraph& g, double h_max, double L);
DiscPtr make_discretization(const MetricGraph& g, const MeshOptions& opt);

/// Nodal values of an H^1 function over the global unknowns of one mesh.
struct GridFunction {
  DiscPtr disc;
  Eigen::VectorXd values;

  GridFunction() = default;
  explicit GridFunction(DiscPtr d)
      : disc(std::move(d)), values(Eigen::VectorXd::Zero(disc->mesh.n_nodes)) {}
  GridFunction(DiscPtr d, Eigen::VectorXd v) : disc(std::move(d)), values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
};

struct Norms {
  double l2sq = 0;
  double lpp = 0;
  double gradsq = 0;
  double sup = 0;
};

/// l2sq = u'Mu, gradsq = u'Su, lpp via 3-point Gauss per element, sup = max |u|.
Norms norms(const GridFunction& u, double p);
double mass_of(const GridFunction& u);

/// E_rho(u) = 1/2 ||u'||^2 - (rho/p) ||u||_p^p, consistent with norms().
double energy(const GridFunction& u, double rho, double p);

/// Load vector D(u)_i = \int |u|^{p-2} u phi_i (same 3-point Gauss as lpp).
Eigen::VectorXd nonlinear_load(const GridFunction& u, double p);
/// Jacobian of the load: (p-1) \int |u|^{p-2} phi_i phi_j.
Eigen::SparseMatrix<double> nonlinear_jacobian(const GridFunction& u, double p);

/// Riesz representative g with  mass*g = stiffness*u - rho*load(u).
GridFunction energy_gradient(const GridFunction& u, double rho, double p);

/// Mass-norm of the weak residual  stiffness*u + lambda*mass*u - rho*load(u).
double pde_residual(const GridFunction& u, double lambda, double rho, double p);

/// sqrt(mu / l2sq) * u; throws CannotProjectError for u = 0.
GridFunction project_mass(const GridFunction& u, double mu);

/// Smallest generalized eigenvalue of (stiffness, mass) by inverse iteration.
double lambda_bottom(const DiscPtr& disc);

/// A point of the metric graph in mesh coordinates.
struct GraphPoint {
  bool on_halfline = false;
  int index = 0;  // finite-edge index or half-line index
  double x = 0;   // local coordinate
};

/// Evaluate f at every mesh node. f must be single-valued at vertices.
GridFunction sample(const DiscPtr& disc, const std::function<double(const GraphPoint&)>& f);

/// Shortest-path metric distance between two points of the graph.
double graph_distance(const MetricGraph& g, const GraphPoint& a, const GraphPoint& b);

/// Nodal interpolant of x -> profile(graph_distance(x, center)).
GridFunction sample_radial(const DiscPtr& disc, const GraphPoint& center,
                           const std::function<double(double)>& profile);

/// CSV serialization: one row (edge_id, local_coordinate, value) per mesh node,
/// preceded by a '#'-prefixed JSON header that makes the mesh reproducible.
void write_csv(const GridFunction& u, std::ostream& out);
void write_csv(const GridFunction& u, const std::string& path);

}  // namespace graphnls
