#include "graphnls/stationary_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "graphnls/closed_forms.hpp"
#include "graphnls/errors.hpp"

namespace graphnls {

namespace {

bool is_positive(const GridFunction& u) {
  if (u.values.size() == 0) return false;
  const double sup = u.values.cwiseAbs().maxCoeff();
  // discretization-scale undershoot is tolerated
  return sup > 0 && u.values.minCoeff() > -1e-8 * sup;
}

StationarySolution finalize(GridFunction u, double lambda, double mu, double rho, double p,
                            int iterations, std::vector<double> history) {
  StationarySolution s;
  s.lambda = lambda;
  s.mu = mu;
  s.rho = rho;
  s.p = p;
  s.energy = energy(u, rho, p);
  s.residual = pde_residual(u, lambda, rho, p);
  s.iterations = iterations;
  s.positive = is_positive(u);
  s.residual_history = std::move(history);
  s.u = std::move(u);
  return s;
}

// Mass-norm of the weak residual vector plus the constraint defect.
double merit(const Discretization& d, const Eigen::VectorXd& f1, double f2) {
  const double v = f1.dot(d.mass_solver->solve(f1));
  return std::sqrt(std::max(0.0, v) + f2 * f2);
}

}  // namespace

SolverConfig SolverConfig::defaults() {
  SolverConfig c;
  for (int i = 0; i <= 10; ++i) c.rho_grid.push_back(0.5 + 0.05 * i);
  c.rho_grid.back() = 1.0;
  return c;
}

double multiplier(const GridFunction& u, double mu, double rho, double p) {
  const Norms n = norms(u, p);
  return (rho * n.lpp - n.gradsq) / mu;
}

StationarySolution newton_constrained(const GridFunction& u0, double mu, double rho,
                                      double p, const SolverConfig& cfg) {
  if (!(mu > 0)) throw InvalidParameterError("mass must be positive");
  if (mass_of(u0) <= 0) throw InvalidParameterError("newton_constrained needs u0 != 0");
  const auto disc = u0.disc;
  const auto& d = *disc;
  const int n = d.mesh.n_nodes;

  GridFunction u = project_mass(u0, mu);
  double lambda = multiplier(u, mu, rho, p);
  std::vector<double> history;

  auto residual_pair = [&](const GridFunction& v, double lam) {
    Eigen::VectorXd f1 = d.ops.stiffness * v.values + lam * (d.ops.mass * v.values) -
                         rho * nonlinear_load(v, p);
    double f2 = mass_of(v) - mu;
    return std::make_pair(std::move(f1), f2);
  };

  auto [f1, f2] = residual_pair(u, lambda);
  double m_old = merit(d, f1, f2);

  // Round-off floor of the residual: the weak form is a difference of terms of
  // this magnitude, so no double-precision iterate can do better than ~eps of it.
  auto residual_scale = [&](const GridFunction& v, double lam) {
    const Eigen::VectorXd Sv = d.ops.stiffness * v.values;
    const Eigen::VectorXd Mv = d.ops.mass * v.values;
    const Eigen::VectorXd Dv = nonlinear_load(v, p);
    auto mnorm = [&](const Eigen::VectorXd& w) {
      return std::sqrt(std::max(0.0, w.dot(d.mass_solver->solve(w))));
    };
    return mnorm(Sv) + std::abs(lam) * mnorm(Mv) + std::abs(rho) * mnorm(Dv);
  };
  auto accept_at_floor = [&](int it, std::vector<double>&& hist) {
    GridFunction out = project_mass(u, mu);
    const double lam = multiplier(out, mu, rho, p);
    return finalize(std::move(out), lam, mu, rho, p, it, std::move(hist));
  };

  for (int it = 0; it < cfg.max_iter; ++it) {
    history.push_back(pde_residual(u, lambda, rho, p));
    if (history.back() <= cfg.tol_residual && std::abs(f2) <= 1e-11 * std::max(1.0, mu)) {
      GridFunction out = project_mass(u, mu);
      const double lam = multiplier(out, mu, rho, p);
      return finalize(std::move(out), lam, mu, rho, p, it, std::move(history));
    }

    // bordered Jacobian [S + lambda*M - rho*J_D,  M u; 2(Mu)^T, 0]
    Eigen::SparseMatrix<double> A11 =
        d.ops.stiffness + lambda * d.ops.mass - rho * nonlinear_jacobian(u, p);
    Eigen::VectorXd Mu = d.ops.mass * u.values;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(A11.nonZeros() + 2 * n);
    for (int k = 0; k < A11.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator i(A11, k); i; ++i)
        t.emplace_back(static_cast<int>(i.row()), static_cast<int>(i.col()), i.value());
    for (int i = 0; i < n; ++i) {
      t.emplace_back(i, n, Mu[i]);
      t.emplace_back(n, i, 2.0 * Mu[i]);
    }
    Eigen::SparseMatrix<double> A(n + 1, n + 1);
    A.setFromTriplets(t.begin(), t.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success)
      throw SingularJacobianError("bordered Jacobian is singular");
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -f1;
    rhs[n] = -f2;
    Eigen::VectorXd delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
      throw SingularJacobianError("bordered Jacobian solve failed");

    double step = 1.0;
    bool accepted = false;
    while (step >= cfg.damping_min) {
      GridFunction cand(disc, u.values + step * delta.head(n));
      const double lam_cand = lambda + step * delta[n];
      auto [g1, g2] = residual_pair(cand, lam_cand);
      const double m_new = merit(d, g1, g2);
      if (m_new <= (1.0 - 0.25 * step) * m_old || m_new <= cfg.tol_residual) {
        u = std::move(cand);
        lambda = lam_cand;
        f1 = std::move(g1);
        f2 = g2;
        m_old = m_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // stalled: converged to the floating-point floor, or genuinely stuck
      if (m_old <= 1e-9 * residual_scale(u, lambda))
        return accept_at_floor(it, std::move(history));
      throw NumericalFailureError("Newton line search stalled (residual " +
                                  std::to_string(m_old) + ")");
    }
  }
  if (m_old <= 1e-9 * residual_scale(u, lambda))
    return accept_at_floor(cfg.max_iter, std::move(history));
  throw NumericalFailureError("newton_constrained did not converge in " +
                              std::to_string(cfg.max_iter) + " iterations");
}

StationarySolution gradient_flow_normalized(const GridFunction& u0, double mu, double rho,
                                            double p, const SolverConfig& cfg) {
  if (mass_of(u0) <= 0) throw InvalidParameterError("gradient flow needs u0 != 0");
  const auto disc = u0.disc;
  const auto& d = *disc;
  GridFunction u = project_mass(u0, mu);
  double dt = cfg.dt;
  double e_old = energy(u, rho, p);
  int it = 0;
  for (; it < cfg.flow_max_iter; ++it) {
    const GridFunction g = energy_gradient(u, rho, p);
    const double lam = multiplier(u, mu, rho, p);
    Eigen::VectorXd tangent = g.values + lam * u.values;  // sphere-tangent gradient
    const double pg = std::sqrt(std::max(0.0, tangent.dot(d.ops.mass * tangent)));
    if (pg <= cfg.flow_tol) break;

    bool stepped = false;
    for (int backoff = 0; backoff <= 30; ++backoff) {
      GridFunction cand(disc, u.values - dt * tangent);
      cand = project_mass(cand, mu);
      const double e_new = energy(cand, rho, p);
      if (e_new <= e_old + 1e-14 * std::abs(e_old)) {
        u = std::move(cand);
        e_old = e_new;
        dt = std::min(dt * 1.1, 10.0 * cfg.dt);
        stepped = true;
        break;
      }
      dt *= 0.5;
    }
    if (!stepped)
      throw NumericalFailureError("gradient flow step failure (energy would increase)");
  }
  // final polish
  StationarySolution s = newton_constrained(u, mu, rho, p, cfg);
  s.iterations += it;
  return s;
}

StationarySolution nehari_minimize(const DiscPtr& disc, double lambda, double p,
                                   const SolverConfig& cfg, const GridFunction* seed) {
  if (!(lambda > 0)) throw InvalidParameterError("nehari_minimize needs lambda > 0");
  if (!(p > 2)) throw InvalidParameterError("nehari_minimize needs p > 2");
  const auto& d = *disc;
  const auto& g = d.mesh.graph;

  auto nehari_project = [&](GridFunction v) {
    const Norms n = norms(v, p);
    if (!(n.lpp > 1e-300)) throw CannotProjectError("collapsed to zero");
    const double t = std::pow((n.gradsq + lambda * n.l2sq) / n.lpp, 1.0 / (p - 2.0));
    v.values *= t;
    return v;
  };
  auto J = [&](const GridFunction& v) {
    const Norms n = norms(v, p);
    return 0.5 * n.gradsq + 0.5 * lambda * n.l2sq - n.lpp / p;
  };

  // seed list: sech-shaped bumps at edge midpoints, then at the half-line
  // attachment vertices (a bump in the interior of a half-line excites the
  // translation quasi-null mode and cripples the final Newton polish)
  std::vector<GraphPoint> centers;
  for (int i = 0; i < g.n_edges(); ++i) centers.push_back({false, i, g.edges[i].length / 2});
  for (int i = 0; i < g.n_halflines(); ++i) centers.push_back({true, i, 0.0});
  if (centers.empty()) centers.push_back({true, 0, 1.0});
  const double peak = std::pow(lambda * p / 2.0, 1.0 / (p - 2.0));
  const double rate = (p - 2.0) / 2.0 * std::sqrt(lambda);
  const double q = 2.0 / (p - 2.0);

  const int max_restarts = std::min<int>(5, static_cast<int>(centers.size()));
  for (int attempt = 0; attempt < std::max(1, max_restarts); ++attempt) {
    GridFunction v;
    try {
      if (seed && attempt == 0) {
        v = nehari_project(*seed);
      } else {
        const auto& c = centers[attempt % centers.size()];
        v = nehari_project(sample_radial(disc, c, [&](double r) {
          return peak * std::pow(1.0 / std::cosh(rate * r), q);
        }));
      }
    } catch (const CannotProjectError&) {
      continue;
    }

    double dt = cfg.dt;
    double j_old = J(v);
    bool collapsed = false;
    for (int it = 0; it < cfg.flow_max_iter; ++it) {
      Eigen::VectorXd grad = d.mass_solver->solve(
          d.ops.stiffness * v.values + lambda * (d.ops.mass * v.values) -
          nonlinear_load(v, p));
      const double gn = std::sqrt(std::max(0.0, grad.dot(d.ops.mass * grad)));
      if (gn <= std::max(cfg.flow_tol, 1e3 * cfg.tol_residual)) break;
      bool stepped = false;
      for (int backoff = 0; backoff <= 40; ++backoff) {
        try {
          GridFunction cand = nehari_project({disc, v.values - dt * grad});
          const double j_new = J(cand);
          if (j_new <= j_old + 1e-14 * std::abs(j_old)) {
            v = std::move(cand);
            j_old = j_new;
            dt = std::min(dt * 1.1, 10.0 * cfg.dt);
            stepped = true;
            break;
          }
        } catch (const CannotProjectError&) {
          collapsed = true;
          break;
        }
        dt *= 0.5;
      }
      if (collapsed || !stepped) break;
    }
    if (collapsed) continue;

    // free-Newton polish of  S v + lambda M v - D(v) = 0
    std::vector<double> history;
    auto mnorm = [&](const Eigen::VectorXd& w) {
      return std::sqrt(std::max(0.0, w.dot(d.mass_solver->solve(w))));
    };
    for (int it = 0; it < cfg.max_iter; ++it) {
      const Eigen::VectorXd Sv = d.ops.stiffness * v.values;
      const Eigen::VectorXd Mv = d.ops.mass * v.values;
      const Eigen::VectorXd Dv = nonlinear_load(v, p);
      Eigen::VectorXd f = Sv + lambda * Mv - Dv;
      const double r = mnorm(f);
      history.push_back(r);
      // accept at the round-off floor of the weak form as well (see the
      // residual_scale rationale in newton_constrained)
      const double floor = 1e-9 * (mnorm(Sv) + std::abs(lambda) * mnorm(Mv) + mnorm(Dv));
      if (r <= std::max(cfg.tol_residual, floor)) {
        const double m = mass_of(v);
        StationarySolution s =
            finalize(std::move(v), lambda, m, 1.0, p, it, std::move(history));
        s.mu = m;
        return s;
      }
      Eigen::SparseMatrix<double> A =
          d.ops.stiffness + lambda * d.ops.mass - nonlinear_jacobian(v, p);
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
      if (lu.info() != Eigen::Success) break;
      Eigen::VectorXd delta = lu.solve(-f);
      if (lu.info() != Eigen::Success) break;
      // damped update: the linearization has a translation quasi-null mode on
      // graphs with long half-lines, so undamped steps can blow up along it
      double stepn = 1.0;
      bool improved = false;
      while (stepn >= 1e-6) {
        Eigen::VectorXd vals = v.values + stepn * delta;
        Eigen::VectorXd ft = d.ops.stiffness * vals + lambda * (d.ops.mass * vals) -
                             nonlinear_load({disc, vals}, p);
        if (mnorm(ft) < r) {
          v.values = std::move(vals);
          improved = true;
          break;
        }
        stepn *= 0.5;
      }
      if (!improved) {
        // stalled: accept only within a small factor of the round-off floor
        if (r <= 10.0 * floor) {
          const double mfin = mass_of(v);
          StationarySolution s =
              finalize(std::move(v), lambda, mfin, 1.0, p, it, std::move(history));
          s.mu = mfin;
          return s;
        }
        break;
      }
    }
    // polish failed: try next seed
  }
  throw NumericalFailureError("nehari_minimize failed after seed restarts");
}

std::vector<StationarySolution> rho_continuation(const GridFunction& u0, double mu,
                                                 double p, const SolverConfig& cfg) {
  const std::vector<double> grid =
      cfg.rho_grid.empty() ? SolverConfig::defaults().rho_grid : cfg.rho_grid;
  std::vector<StationarySolution> chain;
  GridFunction u = project_mass(u0, mu);
  double reached = std::numeric_limits<double>::quiet_NaN();
  for (double target : grid) {
    // step toward `target`, bisecting the rho-step on failure
    StationarySolution sol;
    double step_target = target;
    int splits = 0;
    while (true) {
      try {
        sol = newton_constrained(u, mu, step_target, p, cfg);
      } catch (const Error&) {
        if (std::isnan(reached) || ++splits > 8)
          throw NumericalFailureError("rho-continuation failed at rho = " +
                                      std::to_string(step_target));
        step_target = 0.5 * (reached + step_target);
        continue;
      }
      u = sol.u;
      reached = step_target;
      if (step_target == target) break;
      step_target = target;  // retry the full target from the closer warm start
    }
    chain.push_back(std::move(sol));
  }
  return chain;
}

ExplicitFormulas explicit_even_halfline_formulas(const MetricGraph& g, double lambda,
                                                 double p) {
  if (!(lambda > 0)) throw InvalidParameterError("lambda must be positive");
  if (!(p > 2)) throw InvalidParameterError("p must exceed 2");
  ExplicitFormulas f;
  f.core_value = std::pow(lambda, 1.0 / (p - 2.0));
  f.peak = std::pow(lambda * p / 2.0, 1.0 / (p - 2.0));
  // phi_lambda(tau) = lambda^{1/(p-2)}  <=>  cosh(c sqrt(lambda) tau) = sqrt(p/2);
  // bisection rather than acosh for branch safety.
  const double target = std::sqrt(p / 2.0);
  double lo = 0.0, hi = 1.0;
  while (std::cosh(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::cosh(mid) < target ? lo : hi) = mid;
  }
  const double c = (p - 2.0) / 2.0;
  f.tau = 0.5 * (lo + hi) / (c * std::sqrt(lambda));

  const double K = g.compact_core_length();
  const double k = g.n_halflines() / 2.0;
  f.mass = K * std::pow(lambda, 2.0 / (p - 2.0)) +
           k * std::pow(lambda, (6.0 - p) / (2.0 * (p - 2.0))) * soliton_mass_factor(p);
  f.energy = k * (0.5 * soliton_gradsq(p) - soliton_lp_norm_pp(p) / p) *
                 std::pow(lambda, (p + 2.0) / (2.0 * (p - 2.0))) -
             K / p * std::pow(lambda, p / (p - 2.0));
  return f;
}

namespace {

// Pair the half-lines at each vertex: even position in the per-vertex list
// gets the rising branch phi(x - tau), odd the decaying branch phi(x + tau).
std::vector<bool> rising_flags(const MetricGraph& g) {
  std::vector<bool> rising(g.n_halflines(), false);
  std::vector<int> seen(g.n_vertices(), 0);
  for (int i = 0; i < g.n_halflines(); ++i)
    rising[i] = (seen[g.halflines[i]]++ % 2 == 0);
  return rising;
}

}  // namespace

StationarySolution explicit_even_halfline_solution(const DiscPtr& disc, double lambda,
                                                   double p) {
  const auto& g = disc->mesh.graph;
  const auto topo = classify(g);
  if (!topo.every_vertex_even_halflines || g.n_edges() == 0)
    throw UnsupportedTopologyError(
        "explicit solution needs >= 1 finite edge and an even number of half-lines at "
        "every vertex");
  if (!g.dirichlet_vertices.empty())
    throw UnsupportedTopologyError(
        "explicit solution has a constant core and cannot satisfy Dirichlet caps");
  const auto f = explicit_even_halfline_formulas(g, lambda, p);
  const double c = (p - 2.0) / 2.0;
  const double rate = c * std::sqrt(lambda);
  const double q = 2.0 / (p - 2.0);
  auto phi = [&](double s) { return f.peak * std::pow(1.0 / std::cosh(rate * s), q); };
  const auto rising = rising_flags(g);
  GridFunction u = sample(disc, [&](const GraphPoint& pt) {
    if (!pt.on_halfline) return f.core_value;
    return rising[pt.index] ? phi(pt.x - f.tau) : phi(pt.x + f.tau);
  });
  const double m = mass_of(u);
  StationarySolution s = finalize(std::move(u), lambda, m, 1.0, p, 0, {});
  return s;
}

MeshOptions explicit_solution_mesh_options(const MetricGraph& g, double lambda, double p,
                                           double h_max) {
  const auto f = explicit_even_halfline_formulas(g, lambda, p);
  const double rate = (p - 2.0) / 2.0 * std::sqrt(lambda);
  MeshOptions opt;
  opt.h_max = h_max;
  opt.L = f.tau + 35.0 / std::sqrt(lambda);
  const auto rising = rising_flags(g);
  const double h_min = h_max / std::max(1.0, rate);
  if (h_min < h_max)
    for (int i = 0; i < g.n_halflines(); ++i)
      opt.refine.push_back({true, i, rising[i] ? f.tau : 0.0, h_min});
  return opt;
}

}  // namespace graphnls
