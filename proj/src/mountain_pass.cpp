#include "graphnls/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "graphnls/closed_forms.hpp"
#include "graphnls/errors.hpp"
#include "graphnls/stationary_solver.hpp"

namespace graphnls {

double MPConfig::a_p(double p) {
  if (!(p > 6)) throw OutOfRegimeError("a_p is defined for p > 6");
  return std::pow((p - 2.0) / 4.0, 2.0 / (p - 6.0));
}

double MPConfig::b_endpoint_scale(double p, double rho) {
  if (!(p > 6)) throw OutOfRegimeError("b_endpoint_scale is defined for p > 6");
  return std::pow((p - 2.0) * rho / 2.0, 2.0 / (p - 6.0));
}

namespace {

using BeadSampler = std::function<GridFunction(double)>;

// Shared builder: fixes eps_p / delta / s_end so the endpoint predicates hold,
// then samples n beads with the s-grid snapped to contain s = 1.
PathOnSphere build_path(double mu_param, double rho, double p, const MPConfig& cfg,
                        const BeadSampler& raw_bead) {
  if (!(p > 6)) throw OutOfRegimeError("path constructions require p > 6");
  const double m = mu_param * soliton_mass_factor(p);
  auto bead = [&](double s) { return project_mass(raw_bead(s), m); };

  const double a = MPConfig::a_p(p);
  double eps = cfg.eps_p > 0 ? cfg.eps_p : a / 8.0;
  double delta = cfg.delta;
  if (delta <= 0) delta = 0.5 * norms(bead(eps), p).gradsq;
  int tries = 0;
  while (norms(bead(eps), p).gradsq > delta) {
    if (++tries > 20) throw ConfigurationError("cannot reach A_delta by shrinking eps_p");
    eps *= 0.5;
  }

  double s_end = std::max(a + eps, cfg.s_end_margin * MPConfig::b_endpoint_scale(p, rho));
  tries = 0;
  while (energy(bead(s_end), 0.5, p) >= 0) {
    if (++tries > 20) throw ConfigurationError("cannot reach B by extending the path");
    s_end *= 1.5;
  }

  const int n = std::max(cfg.n_beads, 16);
  std::vector<double> sg(n);
  for (int i = 0; i < n; ++i) sg[i] = eps + (s_end - eps) * i / (n - 1);
  if (eps < 1.0 && 1.0 < s_end) {
    int best = 1;
    for (int i = 1; i + 1 < n; ++i)
      if (std::abs(sg[i] - 1.0) < std::abs(sg[best] - 1.0)) best = i;
    sg[best] = 1.0;
  }

  PathOnSphere path;
  path.mass = m;
  path.mu_param = mu_param;
  path.rho = rho;
  path.p = p;
  path.delta = delta;
  path.s_values = sg;
  path.beads.reserve(n);
  for (double s : sg) path.beads.push_back(bead(s));
  return path;
}

const FiniteEdge& find_loop(const MetricGraph& g, int* index = nullptr) {
  for (int i = 0; i < g.n_edges(); ++i)
    if (g.edges[i].is_loop()) {
      if (index) *index = i;
      return g.edges[i];
    }
  throw UnsupportedTopologyError("graph has no loop");
}

}  // namespace

PathOnSphere canonical_line_path(const DiscPtr& disc, double mu_param, double rho,
                                 double p, const MPConfig& cfg) {
  const auto& g = disc->mesh.graph;
  if (g.n_halflines() != 2 || g.n_edges() != 0)
    throw UnsupportedTopologyError("canonical_line_path needs the line graph");
  const auto sp = SolitonParams::make(p, mu_param, rho);
  return build_path(mu_param, rho, p, cfg, [&](double s) {
    return sample(disc, [&](const GraphPoint& pt) {
      const double x = pt.on_halfline && pt.index == 0 ? -pt.x : pt.x;
      return std::sqrt(s) * soliton_eval(sp, s * x);
    });
  });
}

PathOnSphere halfline_pair_path(const DiscPtr& disc, int h0, int h1, double mu_param,
                                double rho, double p, const MPConfig& cfg) {
  const auto& g = disc->mesh.graph;
  if (h0 < 0 || h1 < 0 || h0 == h1 || h0 >= g.n_halflines() || h1 >= g.n_halflines())
    throw InvalidParameterError("halfline_pair_path needs two distinct half-lines");
  if (g.halflines[h0] != g.halflines[h1])
    throw UnsupportedTopologyError("the two half-lines must share a vertex");
  const auto sp = SolitonParams::make(p, mu_param, rho);
  // The pair h0 + h1 is an isometric copy of the line, but the junction vertex
  // is shared with the rest of the graph, so a profile peaking there could not
  // vanish on the remaining components without a kink. Translate the soliton to
  // one third of the way down h1 (see pair_center_offset); the trace it leaves
  // at the junction and beyond decays like exp(-c s sqrt(lambda) x0) and is
  // continued radially, so the bead is globally continuous with a negligible
  // energy surplus for every s on the path.
  const double x0 = pair_center_offset(disc, h1);
  const GraphPoint junction{true, h1, 0.0};
  const auto& carrier = disc->mesh.halflines[h1];
  return build_path(mu_param, rho, p, cfg, [&](double s) {
    GridFunction u = sample_radial(disc, junction, [&](double d) {
      return std::sqrt(s) * soliton_eval(sp, s * (d + x0));
    });
    for (size_t k = 0; k < carrier.x.size(); ++k)
      if (carrier.node[k] >= 0)
        u.values[carrier.node[k]] =
            std::sqrt(s) * soliton_eval(sp, s * (carrier.x[k] - x0));
    return u;
  });
}

double pair_center_offset(const DiscPtr& disc, int h1) {
  if (h1 < 0 || h1 >= static_cast<int>(disc->mesh.halflines.size()))
    throw InvalidParameterError("pair_center_offset: half-line index out of range");
  return disc->mesh.halflines[h1].L / 3.0;
}

PathOnSphere halfline_restriction_path(const DiscPtr& disc, double mu_param, double rho,
                                       double p, const MPConfig& cfg) {
  const auto& g = disc->mesh.graph;
  if (g.n_halflines() != 1 || g.n_edges() != 0)
    throw UnsupportedTopologyError("halfline_restriction_path needs the half-line graph");
  // restriction of the mass-doubled line path, peak at the vertex
  const auto sp = SolitonParams::make(p, 2.0 * mu_param, rho);
  PathOnSphere path = build_path(mu_param, rho, p, cfg, [&](double s) {
    return sample(disc, [&](const GraphPoint& pt) {
      return std::sqrt(s) * soliton_eval(sp, s * pt.x);
    });
  });
  return path;
}

PathOnSphere edge_supported_path(const DiscPtr& disc, int edge_id, double mu_param,
                                 double rho, double p, const MPConfig& cfg,
                                 bool* taper_warning) {
  const auto& g = disc->mesh.graph;
  if (edge_id < 0 || edge_id >= g.n_edges())
    throw InvalidParameterError("edge_supported_path: edge index out of range");
  const double l = g.edges[edge_id].length / 4.0;
  const auto sp = SolitonParams::make(p, mu_param, rho);
  auto gamma = [&](double s, double y) { return std::sqrt(s) * soliton_eval(sp, s * y); };
  PathOnSphere path = build_path(mu_param, rho, p, cfg, [&](double s) {
    return sample(disc, [&](const GraphPoint& pt) {
      if (pt.on_halfline || pt.index != edge_id) return 0.0;
      const double y = std::abs(pt.x - 2.0 * l);
      if (y <= l) return gamma(s, pt.x - 2.0 * l);
      if (y <= 2.0 * l) return gamma(s, l) * (2.0 - y / l);
      return 0.0;
    });
  });
  if (taper_warning) {
    const double level = path_max_energy(path).first;
    const double line = soliton_energy(p, mu_param, rho);
    *taper_warning = std::abs(level - line) > 0.2 * std::abs(line);
  }
  return path;
}

PathOnSphere pendant_path(const DiscPtr& disc, double mu_param, double rho, double p,
                          const MPConfig& cfg) {
  const auto& g = disc->mesh.graph;
  int pe = -1, tip = -1;
  for (int i = 0; i < g.n_edges(); ++i) {
    const auto& e = g.edges[i];
    if (e.is_loop()) continue;
    if (g.degree(e.u) == 1) { pe = i; tip = e.u; break; }
    if (g.degree(e.v) == 1) { pe = i; tip = e.v; break; }
  }
  if (pe < 0) throw UnsupportedTopologyError("pendant_path needs a pendant edge");
  const double le = g.edges[pe].length;
  const auto sp = SolitonParams::make(p, 2.0 * mu_param, rho);
  // radial profile from the tip: near s = 1 the spike is exponentially
  // confined to the pendant (half-line level), while the flattening beads
  // spread over the whole graph so the A_delta endpoint is reachable
  // (compactly supported shapes have a gradient floor after mass projection)
  const GraphPoint tip_pt{false, pe, tip == g.edges[pe].u ? 0.0 : le};
  return build_path(mu_param, rho, p, cfg, [&](double s) {
    return sample_radial(disc, tip_pt, [&](double d) {
      return std::sqrt(s) * soliton_eval(sp, s * d);
    });
  });
}

PathOnSphere signpost_path(const DiscPtr& disc, double mu_param, double rho, double p,
                           const MPConfig& cfg) {
  const auto& g = disc->mesh.graph;
  int loop_id = -1;
  const auto& loop = find_loop(g, &loop_id);
  const int vj = loop.u;
  const double l = loop.length / 2.0;
  const auto sp = SolitonParams::make(p, mu_param, rho);
  auto gamma = [&](double s, double y) { return std::sqrt(s) * soliton_eval(sp, s * y); };

  // the continuation off the loop: either a half-line at the loop vertex
  // (tadpole) or a bounded stem edge, tapered over its outer half
  int hl = -1;
  for (int i = 0; i < g.n_halflines(); ++i)
    if (g.halflines[i] == vj) { hl = i; break; }
  int stem = -1, stem_from_u = 1;
  if (hl < 0) {
    for (int i = 0; i < g.n_edges(); ++i) {
      const auto& e = g.edges[i];
      if (e.is_loop()) continue;
      if (e.u == vj) { stem = i; stem_from_u = 1; break; }
      if (e.v == vj) { stem = i; stem_from_u = 0; break; }
    }
    if (stem < 0)
      throw UnsupportedTopologyError("signpost_path needs a stem or half-line at the loop");
  }

  return build_path(mu_param, rho, p, cfg, [&](double s) {
    return sample(disc, [&](const GraphPoint& pt) {
      if (!pt.on_halfline && pt.index == loop_id) return gamma(s, pt.x - l);
      if (hl >= 0) {
        if (pt.on_halfline && pt.index == hl) return gamma(s, (pt.x + 2.0 * l) / 2.0);
        return 0.0;
      }
      if (!pt.on_halfline && pt.index == stem) {
        const double ls = g.edges[stem].length;
        const double d = stem_from_u ? pt.x : ls - pt.x;  // distance from the loop vertex
        if (d <= ls / 2.0) return gamma(s, (d + 2.0 * l) / 2.0);
        return gamma(s, (ls / 2.0 + 2.0 * l) / 2.0) * (2.0 - 2.0 * d / ls);
      }
      return 0.0;
    });
  });
}

std::pair<double, int> path_max_energy(const PathOnSphere& path) {
  if (path.beads.empty()) throw InvalidParameterError("empty path");
  double best = -std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int i = 0; i < static_cast<int>(path.beads.size()); ++i) {
    const double e = energy(path.beads[i], path.rho, path.p);
    if (e > best) {
      best = e;
      arg = i;
    }
  }
  return {best, arg};
}

EndpointCheck check_endpoints(const PathOnSphere& path) {
  EndpointCheck c;
  if (path.beads.empty()) return c;
  c.start_gradsq = norms(path.beads.front(), path.p).gradsq;
  c.end_E_half = energy(path.beads.back(), 0.5, path.p);
  c.start_in_A_delta = c.start_gradsq <= path.delta;
  c.end_in_B = c.end_E_half < 0;
  return c;
}

RelaxResult minmax_relax(const PathOnSphere& path0, const MPConfig& cfg) {
  RelaxResult res;
  res.path = path0;
  auto& beads = res.path.beads;
  const int n = static_cast<int>(beads.size());
  if (n < 3) throw InvalidParameterError("minmax_relax needs at least 3 beads");
  const double m = res.path.mass;
  const double rho = res.path.rho, p = res.path.p;
  const auto disc = beads.front().disc;
  const auto& M = disc->ops.mass;

  std::vector<double> E(n);
  for (int i = 0; i < n; ++i) E[i] = energy(beads[i], rho, p);
  double level = *std::max_element(E.begin(), E.end());
  double step = cfg.descent_step;

  // Sphere-tangent residual of one bead (gradient of E restricted to the
  // mass sphere), shared by the descent directions and the climbing test.
  auto sphere_residual = [&](const GridFunction& b) {
    const GridFunction g = energy_gradient(b, rho, p);
    const double lam = multiplier(b, m, rho, p);
    return Eigen::VectorXd(g.values + lam * b.values);
  };
  auto mnorm = [&](const Eigen::VectorXd& w) {
    return std::sqrt(std::max(0.0, w.dot(M * w)));
  };

  for (int iter = 0; iter < cfg.relax_iters; ++iter, ++res.iterations) {
    // interior argmax bead acts as a climbing image: reversing the along-path
    // component of its residual makes it converge to the saddle instead of
    // sliding off the ridge (which would let the discrete max tunnel below
    // the true pass level)
    int ic = 1;
    for (int i = 1; i + 1 < n; ++i)
      if (E[i] > E[ic]) ic = i;

    std::vector<Eigen::VectorXd> dir(n);
    double climb_res = 0;
    for (int i = 1; i + 1 < n; ++i) {
      Eigen::VectorXd t = sphere_residual(beads[i]);
      if (i == ic) {
        climb_res = mnorm(t);
        Eigen::VectorXd tau = beads[ic + 1].values - beads[ic - 1].values;
        tau -= (tau.dot(M * beads[ic].values) / m) * beads[ic].values;
        const double taun = mnorm(tau);
        if (taun > 0) t -= 2.0 * (t.dot(M * tau) / (taun * taun)) * tau;
      }
      const double tn = mnorm(t);
      dir[i] = tn > 0 ? Eigen::VectorXd(t / tn) : Eigen::VectorXd::Zero(t.size());
    }

    const double tol = 1e-12 * std::max(1.0, std::abs(level));
    bool accepted = false;
    for (int backoff = 0; backoff <= 20 && !accepted; ++backoff) {
      std::vector<GridFunction> prop = beads;
      std::vector<double> Ep = E;
      double mx_other = std::max(E.front(), E.back());
      for (int i = 1; i + 1 < n; ++i) {
        prop[i] = project_mass(
            {disc, beads[i].values - step * std::sqrt(m) * dir[i]}, m);
        Ep[i] = energy(prop[i], rho, p);
        if (i != ic) mx_other = std::max(mx_other, Ep[i]);
      }
      // the non-climbing beads must not raise the level; the climbing bead may
      // raise it (back toward the ridge) provided its residual still shrinks
      const bool climb_ok =
          Ep[ic] <= level + tol || mnorm(sphere_residual(prop[ic])) < climb_res;
      if (mx_other <= level + tol && climb_ok) {
        beads = std::move(prop);
        E = std::move(Ep);
        level = *std::max_element(E.begin(), E.end());
        step = std::min(step * 1.3, 10.0 * cfg.descent_step);
        accepted = true;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }

    // energy-arclength reparametrization (endpoints bitwise fixed; the
    // climbing bead keeps its position on the ridge)
    double escale = *std::max_element(E.begin(), E.end()) -
                    *std::min_element(E.begin(), E.end());
    if (escale <= 0) escale = std::max(1.0, std::abs(level));
    std::vector<double> cum(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
      Eigen::VectorXd du = beads[i + 1].values - beads[i].values;
      const double dl2 = std::sqrt(std::max(0.0, du.dot(M * du)) / m);
      const double de = std::abs(E[i + 1] - E[i]) / escale;
      cum[i + 1] = cum[i] + std::sqrt(de * de + 0.01 * dl2 * dl2) + 1e-12;
    }
    std::vector<GridFunction> re = beads;
    std::vector<double> Er = E;
    bool ok = true;
    for (int j = 1; j + 1 < n; ++j) {
      if (j == ic) continue;
      const double target = cum.back() * j / (n - 1);
      int k = 0;
      while (k + 2 < n && cum[k + 1] < target) ++k;
      const double w = (target - cum[k]) / (cum[k + 1] - cum[k]);
      re[j] = project_mass(
          {disc, (1.0 - w) * beads[k].values + w * beads[k + 1].values}, m);
      Er[j] = energy(re[j], rho, p);
      if (Er[j] > level + 1e-9 * std::max(1.0, std::abs(level))) ok = false;
    }
    if (ok) {
      beads = std::move(re);
      E = std::move(Er);
      level = *std::max_element(E.begin(), E.end());
    }
  }

  res.level = level;
  res.argmax_index =
      static_cast<int>(std::max_element(E.begin(), E.end()) - E.begin());
  return res;
}

MeshOptions spike_mesh_options(double p, double mu_param, double rho, double h_max,
                               double L, const std::vector<GraphPoint>& centers) {
  const auto e = exponents_and_lambda(p, mu_param, rho);
  const double scale = std::pow(rho, e.alpha) * std::pow(mu_param, e.beta);
  const double s_end = 1.2 * MPConfig::b_endpoint_scale(p, rho);
  const double width = 2.0 / ((p - 2.0) * scale);  // 1 / small_c / scale
  MeshOptions opt;
  opt.h_max = h_max;
  opt.L = L;
  const double h_min = std::min(h_max, width / (24.0 * s_end));
  if (h_min < h_max)
    for (const auto& c : centers) opt.refine.push_back({c.on_halfline, c.index, c.x, h_min});
  return opt;
}

MeshOptions line_path_mesh_options(const MetricGraph& g, double p, double mu_param,
                                   double rho, double h_max) {
  // the half-line graph carries the restriction of the mass-doubled soliton
  if (g.n_halflines() == 1 && g.n_edges() == 0) mu_param *= 2.0;
  const auto e = exponents_and_lambda(p, mu_param, rho);
  const double scale = std::pow(rho, e.alpha) * std::pow(mu_param, e.beta);
  const double eps = MPConfig::a_p(p) / 16.0;  // flattest bead after auto-halving
  const double L = std::clamp(20.0 / (eps * scale), 5.0, 2000.0);
  std::vector<GraphPoint> centers;
  for (int i = 0; i < g.n_halflines(); ++i) centers.push_back({true, i, 0.0});
  return spike_mesh_options(p, mu_param, rho, h_max, L, centers);
}

}  // namespace graphnls
