#include "graphnls/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "graphnls/errors.hpp"
#include "json.hpp"

namespace graphnls {

namespace {

// 3-point Gauss-Legendre on [0, 1].
constexpr double kHalfSqrt35 = 0.38729833462074168852;  // sqrt(3/5)/2
constexpr double kGx[3] = {0.5 - kHalfSqrt35, 0.5, 0.5 + kHalfSqrt35};
constexpr double kGw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Visit every element as (node0, node1, h); node id -1 means Dirichlet cap.
template <class F>
void for_each_element(const Mesh& m, F&& f) {
  for (const auto& g : m.edges)
    for (size_t k = 0; k + 1 < g.x.size(); ++k)
      f(g.node[k], g.node[k + 1], g.x[k + 1] - g.x[k]);
  for (const auto& g : m.halflines)
    for (size_t k = 0; k + 1 < g.x.size(); ++k)
      f(g.node[k], g.node[k + 1], g.x[k + 1] - g.x[k]);
}

double nodal(const Eigen::VectorXd& u, int node) { return node < 0 ? 0.0 : u[node]; }

}  // namespace

Operators assemble(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> ts, tm;
  for_each_element(mesh, [&](int a, int b, double h) {
    const double s = 1.0 / h, m2 = h / 3.0, m1 = h / 6.0;
    if (a >= 0) {
      ts.emplace_back(a, a, s);
      tm.emplace_back(a, a, m2);
    }
    if (b >= 0) {
      ts.emplace_back(b, b, s);
      tm.emplace_back(b, b, m2);
    }
    if (a >= 0 && b >= 0) {
      ts.emplace_back(a, b, -s);
      ts.emplace_back(b, a, -s);
      tm.emplace_back(a, b, m1);
      tm.emplace_back(b, a, m1);
    }
  });
  Operators ops;
  ops.stiffness.resize(mesh.n_nodes, mesh.n_nodes);
  ops.mass.resize(mesh.n_nodes, mesh.n_nodes);
  ops.stiffness.setFromTriplets(ts.begin(), ts.end());
  ops.mass.setFromTriplets(tm.begin(), tm.end());
  return ops;
}

DiscPtr make_discretization(Mesh mesh) {
  auto d = std::make_shared<Discretization>();
  d->mesh = std::move(mesh);
  d->ops = assemble(d->mesh);
  auto solver = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  solver->compute(d->ops.mass);
  if (solver->info() != Eigen::Success)
    throw NumericalFailureError("mass matrix factorization failed");
  d->mass_solver = std::move(solver);
  return d;
}

DiscPtr make_discretization(const MetricGraph& g, double h_max, double L) {
  return make_discretization(build_mesh(g, h_max, L));
}

DiscPtr make_discretization(const MetricGraph& g, const MeshOptions& opt) {
  return make_discretization(build_mesh(g, opt));
}

Norms norms(const GridFunction& u, double p) {
  const auto& d = *u.disc;
  Norms n;
  n.l2sq = u.values.dot(d.ops.mass * u.values);
  n.gradsq = u.values.dot(d.ops.stiffness * u.values);
  n.sup = u.values.size() ? u.values.cwiseAbs().maxCoeff() : 0.0;
  double lpp = 0.0;
  for_each_element(d.mesh, [&](int a, int b, double h) {
    const double ua = nodal(u.values, a), ub = nodal(u.values, b);
    for (int q = 0; q < 3; ++q) {
      const double v = ua + (ub - ua) * kGx[q];
      lpp += h * kGw[q] * std::pow(std::abs(v), p);
    }
  });
  n.lpp = lpp;
  return n;
}

double mass_of(const GridFunction& u) { return u.values.dot(u.disc->ops.mass * u.values); }

double energy(const GridFunction& u, double rho, double p) {
  const Norms n = norms(u, p);
  return 0.5 * n.gradsq - rho / p * n.lpp;
}

Eigen::VectorXd nonlinear_load(const GridFunction& u, double p) {
  const auto& d = *u.disc;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(d.mesh.n_nodes);
  for_each_element(d.mesh, [&](int a, int b, double h) {
    const double ua = nodal(u.values, a), ub = nodal(u.values, b);
    for (int q = 0; q < 3; ++q) {
      const double x = kGx[q];
      const double v = ua + (ub - ua) * x;
      const double f = std::pow(std::abs(v), p - 2.0) * v;
      if (a >= 0) load[a] += h * kGw[q] * f * (1.0 - x);
      if (b >= 0) load[b] += h * kGw[q] * f * x;
    }
  });
  return load;
}

Eigen::SparseMatrix<double> nonlinear_jacobian(const GridFunction& u, double p) {
  const auto& d = *u.disc;
  std::vector<Eigen::Triplet<double>> t;
  for_each_element(d.mesh, [&](int a, int b, double h) {
    const double ua = nodal(u.values, a), ub = nodal(u.values, b);
    double jaa = 0, jab = 0, jbb = 0;
    for (int q = 0; q < 3; ++q) {
      const double x = kGx[q];
      const double v = ua + (ub - ua) * x;
      const double w = h * kGw[q] * (p - 1.0) * std::pow(std::abs(v), p - 2.0);
      jaa += w * (1.0 - x) * (1.0 - x);
      jab += w * (1.0 - x) * x;
      jbb += w * x * x;
    }
    if (a >= 0) t.emplace_back(a, a, jaa);
    if (b >= 0) t.emplace_back(b, b, jbb);
    if (a >= 0 && b >= 0) {
      t.emplace_back(a, b, jab);
      t.emplace_back(b, a, jab);
    }
  });
  Eigen::SparseMatrix<double> J(d.mesh.n_nodes, d.mesh.n_nodes);
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

GridFunction energy_gradient(const GridFunction& u, double rho, double p) {
  const auto& d = *u.disc;
  Eigen::VectorXd rhs = d.ops.stiffness * u.values - rho * nonlinear_load(u, p);
  GridFunction g(u.disc, d.mass_solver->solve(rhs));
  if (d.mass_solver->info() != Eigen::Success)
    throw NumericalFailureError("mass solve failed in energy_gradient");
  return g;
}

double pde_residual(const GridFunction& u, double lambda, double rho, double p) {
  const auto& d = *u.disc;
  Eigen::VectorXd r = d.ops.stiffness * u.values + lambda * (d.ops.mass * u.values) -
                      rho * nonlinear_load(u, p);
  const double v = r.dot(d.mass_solver->solve(r));
  return std::sqrt(std::max(0.0, v));
}

GridFunction project_mass(const GridFunction& u, double mu) {
  if (!(mu > 0)) throw InvalidParameterError("target mass must be positive");
  const double m = mass_of(u);
  if (!(m > 0)) throw CannotProjectError("cannot project the zero function onto a mass sphere");
  return {u.disc, std::sqrt(mu / m) * u.values};
}

double lambda_bottom(const DiscPtr& disc) {
  const auto& S = disc->ops.stiffness;
  const auto& M = disc->ops.mass;
  // shifted inverse iteration for (S + M) x = nu M x; lambda_min = nu_min - 1.
  // Plain inverse iteration stalls when the low modes cluster (long truncated
  // half-lines), so re-center the shift on the Rayleigh quotient as it settles.
  Eigen::SparseMatrix<double> A = S + M;
  const int n = static_cast<int>(S.rows());
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = nd(rng);
  x += Eigen::VectorXd::Ones(n);  // bias toward the low mode
  double sigma = 0.0, nu = 0.0;
  for (int outer = 0; outer < 12; ++outer) {
    Eigen::SparseMatrix<double> Ash = A - sigma * M;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(Ash);
    if (chol.info() != Eigen::Success) {
      if (sigma == 0.0)
        throw NumericalFailureError("factorization failed in lambda_bottom");
      sigma *= 0.5;  // overshot the lowest eigenvalue; retreat
      continue;
    }
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd y = chol.solve(M * x);
      const double yn = std::sqrt(y.dot(M * y));
      if (!(yn > 0.0) || !std::isfinite(yn)) break;
      y /= yn;
      x = y;
      const Eigen::VectorXd Ay = A * y, My = M * y;
      nu = y.dot(Ay);
      const double res =
          (Ay - nu * My).norm() / std::max(1.0, std::abs(nu) * My.norm());
      if (res <= 1e-11) return nu - 1.0;
    }
    sigma = nu - std::max(1e-12, 1e-6 * std::abs(nu));
  }
  throw NumericalFailureError("inverse iteration did not converge in lambda_bottom");
}

GridFunction sample(const DiscPtr& disc, const std::function<double(const GraphPoint&)>& f) {
  GridFunction u(disc);
  const auto& m = disc->mesh;
  for (int i = 0; i < static_cast<int>(m.edges.size()); ++i)
    for (size_t k = 0; k < m.edges[i].x.size(); ++k)
      if (m.edges[i].node[k] >= 0)
        u.values[m.edges[i].node[k]] = f({false, i, m.edges[i].x[k]});
  for (int i = 0; i < static_cast<int>(m.halflines.size()); ++i)
    for (size_t k = 0; k < m.halflines[i].x.size(); ++k)
      if (m.halflines[i].node[k] >= 0)
        u.values[m.halflines[i].node[k]] = f({true, i, m.halflines[i].x[k]});
  return u;
}

namespace {

// Distances from the point `a` to every vertex, by Dijkstra over finite edges.
std::vector<double> vertex_distances(const MetricGraph& g, const GraphPoint& a) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.n_vertices(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  auto seed = [&](int v, double d0) {
    if (d0 < dist[v]) {
      dist[v] = d0;
      pq.emplace(d0, v);
    }
  };
  if (a.on_halfline) {
    seed(g.halflines[a.index], a.x);
  } else {
    const auto& e = g.edges[a.index];
    if (e.is_loop()) {
      seed(e.u, std::min(a.x, e.length - a.x));
    } else {
      seed(e.u, a.x);
      seed(e.v, e.length - a.x);
    }
  }
  while (!pq.empty()) {
    auto [d0, v] = pq.top();
    pq.pop();
    if (d0 > dist[v]) continue;
    for (const auto& e : g.edges) {
      if (e.u == v) seed(e.v, d0 + e.length);
      if (e.v == v) seed(e.u, d0 + e.length);
    }
  }
  return dist;
}

double point_distance(const MetricGraph& g, const std::vector<double>& dist,
                      const GraphPoint& a, const GraphPoint& b) {
  double best = std::numeric_limits<double>::infinity();
  if (a.on_halfline == b.on_halfline && a.index == b.index) {
    best = std::abs(a.x - b.x);
    if (!a.on_halfline && g.edges[a.index].is_loop())
      best = std::min(best, g.edges[a.index].length - best);
  }
  if (b.on_halfline) {
    best = std::min(best, dist[g.halflines[b.index]] + b.x);
  } else {
    const auto& e = g.edges[b.index];
    best = std::min({best, dist[e.u] + b.x, dist[e.v] + e.length - b.x});
  }
  return best;
}

}  // namespace

double graph_distance(const MetricGraph& g, const GraphPoint& a, const GraphPoint& b) {
  return point_distance(g, vertex_distances(g, a), a, b);
}

GridFunction sample_radial(const DiscPtr& disc, const GraphPoint& center,
                           const std::function<double(double)>& profile) {
  const auto dist = vertex_distances(disc->mesh.graph, center);
  return sample(disc, [&](const GraphPoint& q) {
    return profile(point_distance(disc->mesh.graph, dist, center, q));
  });
}

void write_csv(const GridFunction& u, std::ostream& out) {
  const auto& m = u.disc->mesh;
  nlohmann::json hdr;
  hdr["graph"] = nlohmann::json::parse(m.graph.to_json());
  hdr["h_max"] = m.options.h_max;
  hdr["L"] = m.options.L;
  out << "# " << hdr.dump() << "\n";
  out << "edge_id,local_coordinate,value\n";
  out.precision(17);
  for (size_t i = 0; i < m.edges.size(); ++i)
    for (size_t k = 0; k < m.edges[i].x.size(); ++k)
      out << "e" << i << "," << m.edges[i].x[k] << ","
          << nodal(u.values, m.edges[i].node[k]) << "\n";
  for (size_t i = 0; i < m.halflines.size(); ++i)
    for (size_t k = 0; k < m.halflines[i].x.size(); ++k)
      out << "h" << i << "," << m.halflines[i].x[k] << ","
          << nodal(u.values, m.halflines[i].node[k]) << "\n";
}

void write_csv(const GridFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot open output file " + path);
  write_csv(u, out);
}

}  // namespace graphnls
