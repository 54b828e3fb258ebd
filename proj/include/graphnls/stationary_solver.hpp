#pragma once

#include <vector>

#include "graphnls/discretization.hpp"

namespace graphnls {

/// A computed constrained critical point of E_rho on the mass sphere.
struct StationarySolution {
  GridFunction u;
  double lambda = 0;  // Lagrange multiplier, == (rho*lpp - gradsq)/mu at convergence
  double mu = 0;
  double rho = 1;
  double p = 0;
  double energy = 0;
  double residual = 0;  // pde_residual(u, lambda, rho, p)
  int iterations = 0;
  bool positive = false;
  std::vector<double> residual_history;  // per-Newton-step residuals
};

struct SolverConfig {
  double tol_residual = 1e-10;
  int max_iter = 60;
  double damping_min = 1.0 / 1024.0;  // smallest Newton line-search fraction
  double dt = 2e-3;                   // initial flow step
  int flow_max_iter = 40000;
  double flow_tol = 1e-7;  // mass-norm of the projected gradient
  std::vector<double> rho_grid;  // default: 0.5 to 1.0 in steps of 0.05

  static SolverConfig defaults();
};

/// Natural Lagrange multiplier (rho*||u||_p^p - ||u'||^2) / mu.
double multiplier(const GridFunction& u, double mu, double rho, double p);

/// Damped bordered Newton on (u, lambda) for
///   stiffness*u + lambda*mass*u - rho*load(u) = 0,  u'Mu = mu.
StationarySolution newton_constrained(const GridFunction& u0, double mu, double rho,
                                      double p, const SolverConfig& cfg);

/// Projected-gradient descent on the mass sphere with Newton polish.
StationarySolution gradient_flow_normalized(const GridFunction& u0, double mu, double rho,
                                            double p, const SolverConfig& cfg);

/// Minimize J_{lambda,p} restricted to the Nehari manifold
///   ||v'||^2 + lambda*||v||^2 = ||v||_p^p  (mass is an output, not prescribed).
StationarySolution nehari_minimize(const DiscPtr& disc, double lambda, double p,
                                   const SolverConfig& cfg,
                                   const GridFunction* seed = nullptr);

/// Warm-started solves along cfg.rho_grid (default 0.5 -> 1.0); the last entry
/// is the candidate solution of the original (rho = 1) problem.
std::vector<StationarySolution> rho_continuation(const GridFunction& u0, double mu,
                                                 double p, const SolverConfig& cfg);

/// Closed-form ingredients of the paired-half-line explicit solution.
struct ExplicitFormulas {
  double tau = 0;         // offset with phi_lambda(tau) = lambda^{1/(p-2)}
  double core_value = 0;  // lambda^{1/(p-2)}
  double peak = 0;        // (lambda p/2)^{1/(p-2)}
  double mass = 0;        // |K| lambda^{2/(p-2)} + k lambda^{(6-p)/(2(p-2))} ||phi_1||_2^2
  double energy = 0;      // k(||phi_1'||^2/2 - ||phi_1||_p^p/p) lambda^{(p+2)/(2(p-2))}
                          //   - (|K|/p) lambda^{p/(p-2)}
};
ExplicitFormulas explicit_even_halfline_formulas(const MetricGraph& g, double lambda,
                                                 double p);

/// Exact continuum solution on graphs whose every vertex carries an even number
/// of half-lines and at least one finite edge: the constant lambda^{1/(p-2)} on
/// the compact core, with half-lines paired so one carries the rising branch
/// phi_lambda(x - tau) and its partner the decaying branch phi_lambda(x + tau).
StationarySolution explicit_even_halfline_solution(const DiscPtr& disc, double lambda,
                                                   double p);

/// Graded mesh options resolving the explicit solution's half-line peaks.
MeshOptions explicit_solution_mesh_options(const MetricGraph& g, double lambda, double p,
                                           double h_max);

}  // namespace graphnls
