#include <cmath>

#include "doctest.h"
#include "graphnls/closed_forms.hpp"
#include "graphnls/errors.hpp"
#include "graphnls/metric_graph.hpp"
#include "graphnls/stationary_solver.hpp"

using namespace graphnls;

namespace {

GridFunction sampled_soliton(const DiscPtr& disc, double p, double mu, double rho) {
  const auto s = SolitonParams::make(p, mu, rho);
  return sample(disc, [&](const GraphPoint& pt) {
    const double x = pt.on_halfline ? (pt.index == 0 ? -pt.x : pt.x) : pt.x;
    return soliton_eval(s, x);
  });
}

MetricGraph even_bridge() {
  // one finite edge, two half-lines at each endpoint: every vertex even
  MetricGraph g;
  g.vertex_names = {"a", "b"};
  g.edges = {{0, 1, 1.0}};
  g.halflines = {0, 0, 1, 1};
  g.name = "even-bridge";
  g.validate();
  return g;
}

}  // namespace

TEST_CASE("newton recovers the line soliton") {
  const double p = 7.0, rho = 1.0;
  const double m = soliton_mass_factor(p);  // mass of phi_{1,1}
  const auto disc = make_discretization(make_line(), 0.005, 14.0);
  auto u0 = sampled_soliton(disc, p, 1.0, rho);
  u0.values *= 1.07;  // misfit so Newton has real work to do
  const auto cfg = SolverConfig::defaults();
  const auto sol = newton_constrained(u0, m, rho, p, cfg);
  // the weak-form residual bottoms out at the round-off floor of the assembled
  // operators (~1e-9 at this resolution), above the nominal tolerance
  CHECK(sol.residual <= 1e-8);
  CHECK(sol.lambda == doctest::Approx(1.0).epsilon(2e-4));
  CHECK(sol.positive);
  CHECK(sol.iterations <= 12);
  CHECK(mass_of(sol.u) == doctest::Approx(m).epsilon(1e-12));
  CHECK(sol.energy == doctest::Approx(soliton_energy(p, 1.0, rho)).epsilon(2e-3));
  // locally quadratic tail: the last step taken above the round-off floor
  // contracts superlinearly (steps at the floor itself cannot)
  const auto& h = sol.residual_history;
  REQUIRE(h.size() >= 3);
  std::size_t k = h.size();
  while (k > 0 && h[k - 1] <= 1e-7) --k;
  REQUIRE(k >= 1);
  REQUIRE(k < h.size());
  CHECK(h[k] < 0.3 * h[k - 1]);
}

TEST_CASE("multiplier formula on the sampled soliton") {
  const double p = 7.0;
  const double m = soliton_mass_factor(p);
  const auto disc = make_discretization(make_line(), 0.004, 14.0);
  const auto u = sampled_soliton(disc, p, 1.0, 1.0);
  CHECK(multiplier(u, m, 1.0, p) == doctest::Approx(1.0).epsilon(5e-4));
}

TEST_CASE("constant solution on a compact loop") {
  MetricGraph loop;
  loop.vertex_names = {"a"};
  loop.edges = {{0, 0, 3.0}};
  loop.name = "circle";
  const double p = 7.0, rho = 0.8, m = 2.0;
  const auto disc = make_discretization(loop, 0.02, 0.0);
  GridFunction u0(disc);
  u0.values.setConstant(1.0);
  const auto sol = newton_constrained(u0, m, rho, p, SolverConfig::defaults());
  const double ustar = std::sqrt(m / 3.0);
  CHECK(sol.lambda == doctest::Approx(rho * std::pow(ustar, p - 2.0)).epsilon(1e-10));
  CHECK(sol.u.values.maxCoeff() == doctest::Approx(ustar).epsilon(1e-10));
  CHECK(sol.u.values.minCoeff() == doctest::Approx(ustar).epsilon(1e-10));
  CHECK(sol.positive);
}

TEST_CASE("normalized gradient flow reaches the subcritical ground state") {
  const double p = 4.0, rho = 1.0;
  const double m = soliton_mass_factor(p);
  const auto disc = make_discretization(make_line(), 0.02, 20.0);
  // deliberately wrong shape: broad gaussian of the right mass
  auto u0 = sample(disc, [](const GraphPoint& pt) {
    return std::exp(-0.1 * pt.x * pt.x);
  });
  auto cfg = SolverConfig::defaults();
  cfg.flow_tol = 1e-4;  // hand off to the Newton polish early
  const auto sol = gradient_flow_normalized(u0, m, rho, p, cfg);
  CHECK(sol.residual <= cfg.tol_residual);
  CHECK(sol.positive);
  CHECK(sol.energy == doctest::Approx(soliton_energy_any_p(p, 1.0, rho)).epsilon(2e-3));
  CHECK(sol.lambda == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("nehari minimization at lambda = 1 finds the soliton") {
  const double p = 7.0, lambda = 1.0;
  const auto disc = make_discretization(make_line(), 0.005, 14.0);
  const auto cfg = SolverConfig::defaults();
  const auto sol = nehari_minimize(disc, lambda, p, cfg);
  CHECK(sol.residual <= 1e-8);  // round-off floor, as in the Newton test
  CHECK(sol.positive);
  CHECK(sol.lambda == doctest::Approx(lambda));
  const auto n = norms(sol.u, p);
  // action identity on the manifold: J = (1/2 - 1/p)||v||_p^p
  const double J = 0.5 * (n.gradsq + lambda * n.l2sq) - n.lpp / p;
  CHECK(J == doctest::Approx((0.5 - 1.0 / p) * n.lpp).epsilon(1e-8));
  CHECK(n.sup == doctest::Approx(std::pow(p / 2.0, 1.0 / (p - 2.0))).epsilon(1e-3));
  CHECK(mass_of(sol.u) == doctest::Approx(soliton_mass_factor(p)).epsilon(1e-3));
}

TEST_CASE("rho continuation tracks the scaling law") {
  const double p = 7.0, mu_param = 0.5;
  const double m = mu_param * soliton_mass_factor(p);
  MeshOptions opt;
  opt.h_max = 0.02;
  opt.L = 3.0;
  opt.refine = {{true, 0, 0.0, 5e-5}, {true, 1, 0.0, 5e-5}};
  const auto disc = make_discretization(make_line(), opt);
  // seed at the first grid point rho = 0.5
  auto u0 = sampled_soliton(disc, p, mu_param, 0.5);
  auto cfg = SolverConfig::defaults();
  const auto chain = rho_continuation(u0, m, p, cfg);
  REQUIRE(chain.size() >= 2);
  for (const auto& s : chain) {
    CAPTURE(s.rho);
    const double lam_exact = std::pow(s.rho, -4.0) * std::pow(mu_param, -10.0);
    CHECK(s.lambda == doctest::Approx(lam_exact).epsilon(5e-3));
    CHECK(s.positive);
    CHECK(s.residual <= 1e-6 * std::max(1.0, lam_exact));
  }
  CHECK(chain.back().rho == doctest::Approx(1.0));
  // Smaller mass means larger multiplier in the supercritical regime.
  const auto dl = make_discretization(make_line(), 0.005, 14.0);
  auto v0 = sampled_soliton(dl, p, 1.0, 1.0);
  const auto big = newton_constrained(v0, soliton_mass_factor(p), 1.0, p,
                                      SolverConfig::defaults());
  CHECK(chain.back().lambda > big.lambda);
}

TEST_CASE("explicit even-half-line solution") {
  const auto g = even_bridge();
  const double p = 7.0, lambda = 50.0;
  const auto f = explicit_even_halfline_formulas(g, lambda, p);
  CHECK(f.core_value == doctest::Approx(std::pow(lambda, 0.2)).epsilon(1e-13));
  CHECK(f.peak == doctest::Approx(std::pow(3.5 * lambda, 0.2)).epsilon(1e-13));
  CHECK(f.tau > 0);
  // tau solves cosh(c sqrt(lambda) tau) = sqrt(p/2)
  const double c = (p - 2.0) / 2.0;
  CHECK(std::cosh(c * std::sqrt(lambda) * f.tau) ==
        doctest::Approx(std::sqrt(p / 2.0)).epsilon(1e-12));

  const auto opt = explicit_solution_mesh_options(g, lambda, p, 0.005);
  const auto disc = make_discretization(g, opt);
  const auto sol = explicit_even_halfline_solution(disc, lambda, p);
  CHECK(sol.lambda == doctest::Approx(lambda));
  CHECK(sol.positive);
  CHECK(mass_of(sol.u) == doctest::Approx(f.mass).epsilon(5e-5));
  CHECK(sol.energy == doctest::Approx(f.energy).epsilon(1e-3));
  // discretization-limited residual, second order in h on uniform meshes (the
  // graded mesh trades residual order for cheaper mass/energy accuracy)
  const double Lu = f.tau + 35.0 / std::sqrt(lambda);
  const auto solu = explicit_even_halfline_solution(make_discretization(g, 0.005, Lu),
                                                    lambda, p);
  const auto solc = explicit_even_halfline_solution(make_discretization(g, 0.01, Lu),
                                                    lambda, p);
  CHECK(solu.residual < solc.residual);
  CHECK(solc.residual / solu.residual > 3.0);
  CHECK(solc.residual / solu.residual < 5.0);

  CHECK_THROWS_AS(explicit_even_halfline_solution(
                      make_discretization(make_star(3), 0.1, 2.0), lambda, p),
                  UnsupportedTopologyError);
  CHECK_THROWS_AS(explicit_even_halfline_solution(
                      make_discretization(make_line(), 0.1, 2.0), lambda, p),
                  UnsupportedTopologyError);
}

TEST_CASE("degenerate seeds are rejected") {
  const auto disc = make_discretization(make_line(), 0.05, 5.0);
  GridFunction zero(disc);
  CHECK_THROWS_AS(newton_constrained(zero, 1.0, 1.0, 7.0, SolverConfig::defaults()),
                  InvalidParameterError);
  GridFunction one(disc);
  one.values.setOnes();
  CHECK_THROWS_AS(newton_constrained(one, -1.0, 1.0, 7.0, SolverConfig::defaults()),
                  InvalidParameterError);
}
