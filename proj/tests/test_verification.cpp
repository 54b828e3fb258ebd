#include <cmath>

#include "doctest.h"
#include "graphnls/closed_forms.hpp"
#include "graphnls/metric_graph.hpp"
#include "graphnls/stationary_solver.hpp"
#include "graphnls/verification.hpp"

using namespace graphnls;

namespace {

StationarySolution line_soliton_solution(double p, double mu_param) {
  const auto disc = make_discretization(make_line(), 0.005, 14.0);
  const auto s = SolitonParams::make(p, mu_param, 1.0);
  auto u0 = sample(disc, [&](const GraphPoint& pt) {
    const double x = pt.on_halfline ? (pt.index == 0 ? -pt.x : pt.x) : pt.x;
    return soliton_eval(s, x);
  });
  return newton_constrained(u0, mu_param * soliton_mass_factor(p), 1.0, p,
                            SolverConfig::defaults());
}

}  // namespace

TEST_CASE("L-infinity bound check") {
  const auto sol = line_soliton_solution(7.0, 1.0);
  auto rep = check_linfty_bound(sol, std::numeric_limits<double>::infinity());
  CHECK(rep.passed);
  // the line soliton attains the bound with equality, so the discrete sup can
  // sit a hair past the discrete bound; the check's tolerance absorbs that
  CHECK(rep.measured == doctest::Approx(rep.bound_or_target).epsilon(1e-4));
  // negative control: scaling u past the bound must fail the check
  auto bad = sol;
  bad.u.values *= 3.0;
  CHECK_FALSE(check_linfty_bound(bad, std::numeric_limits<double>::infinity()).passed);
}

TEST_CASE("multiplier regime check") {
  const auto sol = line_soliton_solution(7.0, 1.0);
  const auto topo = classify(make_line());
  auto rep = check_multiplier_regime(sol, topo, 0.0);
  CHECK(rep.passed);
  auto bad = sol;
  bad.lambda = -0.5;
  CHECK_FALSE(check_multiplier_regime(bad, topo, 0.0).passed);
}

TEST_CASE("path mass invariant check flags corruption") {
  const double p = 7.0, mu = 0.5;
  const auto g = make_line();
  const auto disc = make_discretization(g, line_path_mesh_options(g, p, mu, 1.0, 0.02));
  auto path = canonical_line_path(disc, mu, 1.0, p, MPConfig{});
  CHECK(check_path_mass_invariant(path).passed);
  path.beads[path.beads.size() / 2].values *= 1.001;  // off-sphere by 2e-3 in mass
  CHECK_FALSE(check_path_mass_invariant(path).passed);
}

TEST_CASE("empirical Gagliardo-Nirenberg constant brackets the soliton quotient") {
  const double p = 7.0;
  const auto disc = make_discretization(make_line(), 0.01, 14.0);
  const auto rep = estimate_gn_constant(disc, p, 120);
  CHECK(rep.passed);
  // the sharp line constant is attained by the soliton
  const double num = soliton_lp_norm_pp(p);
  const double l2 = soliton_mass_factor(p), gr = soliton_gradsq(p);
  const double sharp = num / (std::pow(l2, (p / 2.0 + 1.0) / 2.0) *
                              std::pow(gr, (p / 2.0 - 1.0) / 2.0));
  CHECK(rep.measured <= sharp * 1.001);
  CHECK(rep.measured >= 0.5 * sharp);  // random bumps get reasonably close
}

TEST_CASE("negative energy witness on an even-half-line graph") {
  const auto g = make_tgraph(1.0);  // pendant + two half-lines at the junction
  const double p = 7.0;
  const auto w = negative_energy_witness(g, p, 0.005);
  CHECK(w.report.passed);
  CHECK(w.solution.energy < 0);
  CHECK(w.solution.lambda > 0);
  CHECK(w.solution.positive);
  CHECK(w.solution.residual < 1e-2 * std::max(1.0, w.solution.lambda));
}

TEST_CASE("reference sampled levels agree with closed forms") {
  const double p = 7.0, mu = 0.5, rho = 1.0;
  const double line = sampled_line_level(p, mu, rho, 0.005);
  CHECK(line == doctest::Approx(soliton_energy(p, mu, rho)).epsilon(5e-3));
  const double half = sampled_halfline_level(p, mu, rho, 0.005);
  const double beta = (p - 2.0) / (6.0 - p);
  CHECK(half == doctest::Approx(std::pow(2.0, 2.0 * beta) * soliton_energy(p, mu, rho))
                    .epsilon(5e-3));
}

TEST_CASE("level relation checks on tadpole and tgraph") {
  MPConfig cfg;
  cfg.n_beads = 33;
  cfg.relax_iters = 0;
  const double p = 7.0, mu = 0.2, rho = 1.0;
  SUBCASE("tadpole (signpost bound)") {
    // at this mass the strict gap below the line level is exponentially small
    // (it scales like exp(-2 sqrt(lambda) * loop)), far below double precision,
    // so require agreement with the matched line level instead of strict order
    const auto reps = check_level_relations(make_tadpole(2.0), p, mu, rho, cfg);
    REQUIRE_FALSE(reps.empty());
    for (const auto& r : reps) {
      CAPTURE(r.name);
      if (r.name == "signpost_bound_below_line")
        CHECK(r.measured == doctest::Approx(r.bound_or_target).epsilon(5e-3));
      else
        CHECK(r.passed);
    }
  }
  SUBCASE("tadpole at moderate mass where the signpost gap is resolvable") {
    const auto reps = check_level_relations(make_tadpole(2.0), p, 1.2, rho, cfg);
    bool saw = false;
    for (const auto& r : reps) {
      if (r.name != "signpost_bound_below_line") continue;
      saw = true;
      CAPTURE(r.measured);
      CAPTURE(r.bound_or_target);
      CHECK(r.passed);
      CHECK(r.context.at("margin") > 0.0);
    }
    CHECK(saw);
  }
  SUBCASE("tgraph (pendant bound)") {
    const auto reps = check_level_relations(make_tgraph(2.0), p, mu, rho, cfg);
    REQUIRE_FALSE(reps.empty());
    for (const auto& r : reps) {
      CAPTURE(r.name);
      CHECK(r.passed);
    }
  }
}
