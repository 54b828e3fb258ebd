#include "graphnls/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "graphnls/errors.hpp"

namespace graphnls {

namespace {

// Uniform subdivision of [0, len] with spacing <= h (at least 2 elements).
std::vector<double> uniform_points(double len, double h) {
  int n = std::max(2, static_cast<int>(std::ceil(len / h)));
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = len * i / n;
  return x;
}

// Points of a geometric ladder from `center` toward `end`, spacing growing
// from h_min by `ratio` until it caps at h_max.
void graded_side(double center, double end, double h_min, double h_max, double ratio,
                 std::vector<double>* out) {
  const double dir = (end >= center) ? 1.0 : -1.0;
  double x = center;
  double h = h_min;
  while (dir * (end - x) > 1e-14 * std::max(1.0, std::abs(end))) {
    double step = std::min(h, dir * (end - x));
    // avoid a sliver at the end
    if (dir * (end - x) - step < 0.25 * step) step = dir * (end - x);
    x += dir * step;
    out->push_back(x);
    h = std::min(h * ratio, h_max);
  }
  out->back() = end;
}

std::vector<double> graded_points(double len, double h_max, double ratio,
                                  const std::vector<std::pair<double, double>>& centers) {
  std::vector<double> pts;
  for (const auto& [c0, hmin] : centers) {
    const double c = std::clamp(c0, 0.0, len);
    pts.push_back(c);
    graded_side(c, 0.0, hmin, h_max, ratio, &pts);
    graded_side(c, len, hmin, h_max, ratio, &pts);
  }
  pts.push_back(0.0);
  pts.push_back(len);
  std::sort(pts.begin(), pts.end());
  // drop nearly coincident points (keep ends)
  std::vector<double> x;
  double min_h = len;
  for (const auto& [c, hmin] : centers) min_h = std::min(min_h, hmin);
  const double merge_tol = 0.25 * min_h;
  for (double v : pts) {
    if (x.empty() || v - x.back() > merge_tol || v == len) {
      if (!x.empty() && v == len && v - x.back() <= merge_tol) x.back() = len;
      else x.push_back(v);
    }
  }
  if (x.size() < 3) return uniform_points(len, len / 2);
  return x;
}

}  // namespace

int Mesh::n_elements() const {
  int n = 0;
  for (const auto& e : edges) n += static_cast<int>(e.x.size()) - 1;
  for (const auto& h : halflines) n += static_cast<int>(h.x.size()) - 1;
  return n;
}

double Mesh::total_length() const {
  double s = graph.compact_core_length();
  for (const auto& h : halflines) s += h.L;
  return s;
}

Mesh build_mesh(const MetricGraph& g, double h_max, double L) {
  MeshOptions opt;
  opt.h_max = h_max;
  opt.L = L;
  return build_mesh(g, opt);
}

Mesh build_mesh(const MetricGraph& g, const MeshOptions& opt) {
  g.validate();
  if (!(opt.h_max > 0)) throw InvalidParameterError("h_max must be positive");
  if (!g.halflines.empty() && !(opt.L > 0))
    throw InvalidParameterError("half-line truncation length must be positive");
  const double e0 = g.min_edge_length();
  if (std::isfinite(e0) && opt.h_max >= 0.5 * e0)
    throw MeshTooCoarseError("h_max must be below half the shortest edge");

  Mesh m;
  m.graph = g;
  m.options = opt;
  m.vertex_node.assign(g.n_vertices(), -1);
  int next = 0;
  std::vector<bool> dirichlet(g.n_vertices(), false);
  for (int d : g.dirichlet_vertices) dirichlet[d] = true;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (!dirichlet[v]) m.vertex_node[v] = next++;

  auto centers_for = [&](bool on_halfline, int index, double len) {
    std::vector<std::pair<double, double>> c;
    for (const auto& r : opt.refine)
      if (r.on_halfline == on_halfline && r.index == index)
        c.emplace_back(std::clamp(r.center, 0.0, len), r.h_min);
    return c;
  };

  for (int i = 0; i < g.n_edges(); ++i) {
    const auto& e = g.edges[i];
    EdgeGrid eg;
    auto centers = centers_for(false, i, e.length);
    eg.x = centers.empty() ? uniform_points(e.length, opt.h_max)
                           : graded_points(e.length, opt.h_max, opt.grading, centers);
    eg.node.resize(eg.x.size());
    eg.node.front() = m.vertex_node[e.u];
    eg.node.back() = m.vertex_node[e.v];
    for (size_t k = 1; k + 1 < eg.x.size(); ++k) eg.node[k] = next++;
    m.edges.push_back(std::move(eg));
  }
  for (int i = 0; i < g.n_halflines(); ++i) {
    HalflineGrid hg;
    hg.L = opt.L;
    auto centers = centers_for(true, i, opt.L);
    hg.x = centers.empty() ? uniform_points(opt.L, opt.h_max)
                           : graded_points(opt.L, opt.h_max, opt.grading, centers);
    hg.node.resize(hg.x.size());
    hg.node.front() = m.vertex_node[g.halflines[i]];
    for (size_t k = 1; k + 1 < hg.x.size(); ++k) hg.node[k] = next++;
    hg.node.back() = -1;  // Dirichlet cap
    m.halflines.push_back(std::move(hg));
  }
  m.n_nodes = next;
  return m;
}

}  // namespace graphnls
