#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "graphnls/closed_forms.hpp"
#include "graphnls/discretization.hpp"
#include "graphnls/errors.hpp"
#include "graphnls/metric_graph.hpp"

using namespace graphnls;

namespace {
constexpr double kPi = 3.14159265358979323846;

GridFunction sampled_soliton(const DiscPtr& disc, double p, double mu, double rho) {
  const auto s = SolitonParams::make(p, mu, rho);
  return sample(disc, [&](const GraphPoint& pt) {
    const double x = pt.on_halfline ? (pt.index == 0 ? -pt.x : pt.x) : pt.x;
    return soliton_eval(s, x);
  });
}
}  // namespace

TEST_CASE("mesh construction basics") {
  const auto g = make_tadpole(2.0);
  const auto mesh = build_mesh(g, 0.05, 10.0);
  CHECK(mesh.total_length() == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(mesh.edges.size() == 1);
  CHECK(mesh.halflines.size() == 1);
  CHECK(mesh.halflines[0].node.back() == -1);  // truncation cap is Dirichlet
  CHECK_THROWS_AS(build_mesh(g, 1.5, 10.0), MeshTooCoarseError);
  CHECK_THROWS_AS(build_mesh(g, -0.1, 10.0), InvalidParameterError);
}

TEST_CASE("graded refinement concentrates elements") {
  MeshOptions opt;
  opt.h_max = 0.1;
  opt.L = 5.0;
  opt.refine.push_back({/*on_halfline=*/false, /*index=*/0, /*center=*/1.0,
                        /*h_min=*/1e-4});
  const auto g = make_tadpole(2.0);
  const auto mesh = build_mesh(g, opt);
  double smallest = 1e9;
  const auto& xs = mesh.edges[0].x;
  for (size_t i = 0; i + 1 < xs.size(); ++i) smallest = std::min(smallest, xs[i + 1] - xs[i]);
  CHECK(smallest <= 2e-4);
  // far from the center the mesh stays coarse
  const auto uniform = build_mesh(g, opt.h_max, opt.L);
  CHECK(mesh.n_elements() < 8 * uniform.n_elements());
}

TEST_CASE("mass quadrature of the constant function") {
  // u = 1 on tadpole(2) with a truncated half-line: integral 2 + L, up to the
  // O(h) defect of the single capped element.
  const double L = 10.0, h = 0.01;
  const auto disc = make_discretization(make_tadpole(2.0), h, L);
  GridFunction one(disc);
  one.values.setOnes();
  CHECK(mass_of(one) == doctest::Approx(2.0 + L).epsilon(h / (2.0 + L)));
  // compact graph: no cap, the quadrature is exact
  MetricGraph loop;
  loop.vertex_names = {"a", "b"};
  loop.edges = {{0, 1, 1.0}, {1, 0, 2.0}};
  loop.name = "loop";
  const auto dl = make_discretization(loop, 0.05, 0.0);
  GridFunction onel(dl);
  onel.values.setOnes();
  CHECK(mass_of(onel) == doctest::Approx(3.0).epsilon(1e-13));
  const auto nl = norms(onel, 4.0);
  CHECK(nl.gradsq == doctest::Approx(0.0));
  CHECK(nl.lpp == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(nl.sup == doctest::Approx(1.0));
}

TEST_CASE("bottom of the spectrum") {
  // Truncated half-line with Dirichlet cap and Kirchhoff (Neumann) origin:
  // lowest eigenvalue (pi / 2L)^2.
  const double L = 10.0;
  const auto disc = make_discretization(make_halfline(), 0.01, L);
  const double exact = std::pow(kPi / (2.0 * L), 2);
  CHECK(lambda_bottom(disc) == doctest::Approx(exact).epsilon(1e-4));
  // compact graph without Dirichlet data: constant mode, eigenvalue 0
  MetricGraph loop;
  loop.vertex_names = {"a"};
  loop.edges = {{0, 0, 3.0}};
  loop.name = "circle";
  CHECK(lambda_bottom(make_discretization(loop, 0.05, 0.0)) ==
        doctest::Approx(0.0).scale(1).epsilon(1e-9));
}

TEST_CASE("soliton norms against closed forms") {
  const double p = 7.0, h = 0.002, L = 14.0;
  const auto disc = make_discretization(make_line(), h, L);
  const auto u = sampled_soliton(disc, p, 1.0, 1.0);
  const auto n = norms(u, p);
  CHECK(n.l2sq == doctest::Approx(soliton_mass_factor(p)).epsilon(2e-5));
  CHECK(n.lpp == doctest::Approx(soliton_lp_norm_pp(p)).epsilon(2e-5));
  CHECK(n.gradsq == doctest::Approx(soliton_gradsq(p)).epsilon(2e-4));
  CHECK(n.sup == doctest::Approx(std::pow(p / 2.0, 1.0 / (p - 2.0))).epsilon(1e-6));
  // derivative identity: ||u'||^2 / ||u||_p^p = (p-2)/(2p)
  CHECK(n.gradsq / n.lpp == doctest::Approx((p - 2.0) / (2.0 * p)).epsilon(2e-4));
  CHECK(energy(u, 1.0, p) == doctest::Approx(soliton_energy(p, 1.0, 1.0)).epsilon(2e-3));
}

TEST_CASE("energy gradient matches finite differences") {
  const auto disc = make_discretization(make_tadpole(2.0), 0.05, 6.0);
  std::mt19937_64 rng(777);
  std::normal_distribution<double> nd(0.0, 1.0);
  GridFunction u(disc), v(disc);
  for (int i = 0; i < u.size(); ++i) {
    u.values[i] = 0.5 + 0.2 * nd(rng);
    v.values[i] = nd(rng);
  }
  const double rho = 0.7, p = 7.0, eps = 1e-6;
  const auto grad = energy_gradient(u, rho, p);
  const double pairing = grad.values.dot(disc->ops.mass * v.values);
  GridFunction up(disc, u.values + eps * v.values), um(disc, u.values - eps * v.values);
  const double fd = (energy(up, rho, p) - energy(um, rho, p)) / (2 * eps);
  CHECK(pairing == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("pde residual converges at second order") {
  const double p = 7.0;
  double prev = 0;
  std::vector<double> res;
  // L large enough that the truncation kink at the Dirichlet cap (residual
  // contribution ~ u(L) h^{-3/2}) stays below the O(h^2) interior error
  for (double h : {0.04, 0.02, 0.01}) {
    const auto disc = make_discretization(make_line(), h, 30.0);
    const auto u = sampled_soliton(disc, p, 1.0, 1.0);
    res.push_back(pde_residual(u, 1.0, 1.0, p));
    (void)prev;
  }
  CHECK(res[0] / res[1] > 3.0);  // ~4 for O(h^2)
  CHECK(res[1] / res[2] > 3.0);
  CHECK(res[0] / res[1] < 6.0);
  CHECK(res[1] / res[2] < 6.0);
}

TEST_CASE("mass projection") {
  const auto disc = make_discretization(make_tadpole(1.0), 0.05, 4.0);
  GridFunction u(disc);
  u.values.setConstant(0.3);
  const auto v = project_mass(u, 2.5);
  CHECK(mass_of(v) == doctest::Approx(2.5).epsilon(1e-13));
  const auto w = project_mass(v, 2.5);  // idempotent
  CHECK((w.values - v.values).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
  GridFunction z(disc);
  CHECK_THROWS_AS(project_mass(z, 1.0), CannotProjectError);
}

TEST_CASE("graph distance") {
  const auto star = make_star(3);
  GraphPoint a{true, 0, 1.5}, b{true, 2, 0.5};
  CHECK(graph_distance(star, a, b) == doctest::Approx(2.0));
  CHECK(graph_distance(star, a, a) == doctest::Approx(0.0));
  const auto tad = make_tadpole(2.0);
  GraphPoint p1{false, 0, 0.3}, p2{false, 0, 1.9};
  // around the short way through the joint vertex: 0.3 + 0.1
  CHECK(graph_distance(tad, p1, p2) == doctest::Approx(0.4));
  GraphPoint hl{true, 0, 1.0};
  CHECK(graph_distance(tad, p1, hl) == doctest::Approx(1.3));
}

TEST_CASE("radial sampling puts the bump at the requested center") {
  const auto g = make_tgraph(2.0);
  const auto disc = make_discretization(g, 0.02, 6.0);
  GraphPoint tip{false, 0, 2.0};  // pendant tip (edge runs junction -> tip)
  const auto u = sample_radial(disc, tip, [](double d) { return std::exp(-2.0 * d); });
  int argmax = 0;
  u.values.maxCoeff(&argmax);
  // the maximum must be the tip vertex node
  const double maxval = u.values[argmax];
  CHECK(maxval == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("csv writer emits one row per node plus a reproducible header") {
  const auto disc = make_discretization(make_tadpole(1.0), 0.1, 2.0);
  GridFunction u(disc);
  u.values.setConstant(0.125);
  std::ostringstream out;
  write_csv(u, out);
  std::istringstream in(out.str());
  std::string line;
  int header = 0, rows = 0;
  bool saw_column_line = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      ++header;
    } else if (line.rfind("edge_id", 0) == 0) {
      saw_column_line = true;
    } else if (!line.empty()) {
      ++rows;
      // interior rows carry the constant value; the truncation cap row is 0
      if (line.find(",0.125") == std::string::npos)
        CHECK(line.find(",0") != std::string::npos);
    }
  }
  CHECK(header >= 1);
  CHECK(saw_column_line);
  int expected = 0;
  for (const auto& e : disc->mesh.edges) expected += static_cast<int>(e.x.size());
  for (const auto& h : disc->mesh.halflines) expected += static_cast<int>(h.x.size());
  CHECK(rows == expected);
}

TEST_CASE("sup-norm interpolation inequality on decaying samples") {
  // ||u||_inf^2 <= sqrt(2) ||u||_2 ||u'||_2 for functions vanishing at infinity
  const auto disc = make_discretization(make_star(3), 0.02, 12.0);
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> ud(0.5, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double w = ud(rng), a = ud(rng), x0 = ud(rng);
    GraphPoint c{true, trial % 3, x0};
    const auto u = sample_radial(
        disc, c, [&](double d) { return a / std::cosh(w * d); });
    const auto n = norms(u, 4.0);
    CHECK(n.sup * n.sup <=
          std::sqrt(2.0) * std::sqrt(n.l2sq) * std::sqrt(n.gradsq) * (1 + 1e-8));
  }
}
