#include "graphnls/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "graphnls/errors.hpp"
#include "json.hpp"

namespace graphnls {

int MetricGraph::degree(int v) const {
  int d = 0;
  for (const auto& e : edges) {
    if (e.u == v) ++d;
    if (e.v == v) ++d;
  }
  d += halflines_at(v);
  return d;
}

int MetricGraph::halflines_at(int v) const {
  return static_cast<int>(std::count(halflines.begin(), halflines.end(), v));
}

double MetricGraph::compact_core_length() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.length;
  return s;
}

double MetricGraph::min_edge_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : edges) m = std::min(m, e.length);
  return m;
}

void MetricGraph::validate() const {
  const int n = n_vertices();
  if (n == 0) throw InvalidParameterError("graph has no vertices");
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw InvalidParameterError("edge endpoint out of range");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw InvalidParameterError("edge length must be positive and finite");
  }
  for (int h : halflines)
    if (h < 0 || h >= n) throw InvalidParameterError("half-line attachment out of range");
  for (int d : dirichlet_vertices)
    if (d < 0 || d >= n) throw InvalidParameterError("dirichlet vertex out of range");
  for (int v = 0; v < n; ++v)
    if (degree(v) < 1) throw InvalidParameterError("isolated vertex " + vertex_names[v]);
  // connectivity over finite edges + half-lines (half-lines never connect vertices)
  std::vector<int> comp(n, -1);
  std::vector<int> stack = {0};
  comp[0] = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& e : edges) {
      int w = -1;
      if (e.u == v) w = e.v;
      else if (e.v == v) w = e.u;
      if (w >= 0 && comp[w] < 0) {
        comp[w] = 0;
        stack.push_back(w);
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (comp[v] < 0) throw InvalidParameterError("graph is not connected");
}

double min_edge_length(const MetricGraph& g) { return g.min_edge_length(); }

namespace {

// Trail containing target edge `target`, with both ends at (distinct) half-lines.
// Strategy: start from each half-line h, walk edge-disjointly; require that the
// target edge is on the walk before terminating at a different half-line.
bool trail_through_edge(const MetricGraph& g, int target) {
  struct Rec {
    const MetricGraph& g;
    int target;
    std::vector<bool> used;
    Rec(const MetricGraph& g_, int t) : g(g_), target(t), used(g_.edges.size(), false) {}
    bool dfs(int v, int start_h, bool hit) {
      if (hit) {
        for (size_t h = 0; h < g.halflines.size(); ++h)
          if (static_cast<int>(h) != start_h && g.halflines[h] == v) return true;
      }
      for (size_t i = 0; i < g.edges.size(); ++i) {
        if (used[i]) continue;
        const auto& e = g.edges[i];
        // loops can be entered from v and leave back at v
        bool touches = (e.u == v || e.v == v);
        if (!touches) continue;
        int next = (e.u == v) ? e.v : e.u;
        used[i] = true;
        if (dfs(next, start_h, hit || static_cast<int>(i) == target)) {
          used[i] = false;
          return true;
        }
        used[i] = false;
      }
      return false;
    }
  };
  for (size_t h = 0; h < g.halflines.size(); ++h) {
    Rec rec(g, target);
    if (rec.dfs(g.halflines[h], static_cast<int>(h), false)) return true;
  }
  return false;
}

// A half-line must itself lie on a trail with two half-line ends: a walk from
// its vertex over distinct finite edges to another half-line (possibly at the
// same vertex).
bool trail_from_halfline(const MetricGraph& g, int h) {
  struct Rec {
    const MetricGraph& g;
    std::vector<bool> used;
    explicit Rec(const MetricGraph& g_) : g(g_), used(g_.edges.size(), false) {}
    bool dfs(int v, int start_h) {
      for (size_t k = 0; k < g.halflines.size(); ++k)
        if (static_cast<int>(k) != start_h && g.halflines[k] == v) return true;
      for (size_t i = 0; i < g.edges.size(); ++i) {
        if (used[i]) continue;
        const auto& e = g.edges[i];
        if (e.u != v && e.v != v) continue;
        int next = (e.u == v) ? e.v : e.u;
        used[i] = true;
        if (dfs(next, start_h)) {
          used[i] = false;
          return true;
        }
        used[i] = false;
      }
      return false;
    }
  };
  Rec rec(g);
  return rec.dfs(g.halflines[h], h);
}

}  // namespace

TopologyReport classify(const MetricGraph& g) {
  g.validate();
  TopologyReport r;
  r.n_halflines = g.n_halflines();
  r.compact_core_length = g.compact_core_length();

  for (const auto& e : g.edges) {
    if (!e.is_loop() && (g.degree(e.u) == 1 || g.degree(e.v) == 1)) r.has_pendant = true;
  }
  // signpost: a vertex carrying both a loop and a non-loop finite edge
  for (int v = 0; v < g.n_vertices(); ++v) {
    bool loop = false, bounded = false;
    for (const auto& e : g.edges) {
      if (e.is_loop() && e.u == v) loop = true;
      if (!e.is_loop() && (e.u == v || e.v == v)) bounded = true;
    }
    if (loop && bounded) r.has_signpost = true;
  }
  r.every_vertex_even_halflines = true;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (g.halflines_at(v) % 2 != 0) r.every_vertex_even_halflines = false;

  if (r.n_halflines < 2) {
    r.satisfies_H = false;
    return r;
  }
  bool ok = true;
  for (int i = 0; i < g.n_edges() && ok; ++i) ok = trail_through_edge(g, i);
  for (int h = 0; h < g.n_halflines() && ok; ++h) ok = trail_from_halfline(g, h);
  r.satisfies_H = ok;
  return r;
}

MetricGraph make_line() {
  MetricGraph g;
  g.name = "line";
  g.vertex_names = {"o"};
  g.halflines = {0, 0};
  return g;
}

MetricGraph make_halfline() {
  MetricGraph g;
  g.name = "halfline";
  g.vertex_names = {"o"};
  g.halflines = {0};
  return g;
}

MetricGraph make_star(int k) {
  if (k < 2) throw InvalidParameterError("star graph needs k >= 2 half-lines");
  MetricGraph g;
  g.name = "star" + std::to_string(k);
  g.vertex_names = {"c"};
  g.halflines.assign(k, 0);
  return g;
}

MetricGraph make_tadpole(double loop_len) {
  if (!(loop_len > 0)) throw InvalidParameterError("tadpole loop length must be positive");
  MetricGraph g;
  g.name = "tadpole";
  g.vertex_names = {"j"};
  g.edges = {{0, 0, loop_len}};
  g.halflines = {0};
  return g;
}

MetricGraph make_tgraph(double pendant_len) {
  if (!(pendant_len > 0)) throw InvalidParameterError("pendant length must be positive");
  MetricGraph g;
  g.name = "tgraph";
  g.vertex_names = {"j", "tip"};
  g.edges = {{0, 1, pendant_len}};
  g.halflines = {0, 0};
  return g;
}

MetricGraph make_signpost(double loop_len, double stem_len, int extra_halflines) {
  if (!(loop_len > 0) || !(stem_len > 0))
    throw InvalidParameterError("signpost lengths must be positive");
  if (extra_halflines < 1)
    throw InvalidParameterError("signpost needs at least one half-line");
  MetricGraph g;
  g.name = "signpost";
  g.vertex_names = {"j", "s"};
  g.edges = {{0, 0, loop_len}, {0, 1, stem_len}};
  g.halflines.assign(extra_halflines, 1);
  return g;
}

MetricGraph make_ladder(double cell_len, double rung_len, int n_cells, bool dirichlet_caps) {
  if (!(cell_len > 0) || !(rung_len > 0))
    throw InvalidParameterError("ladder lengths must be positive");
  if (n_cells < 1) throw InvalidParameterError("ladder needs n_cells >= 1");
  MetricGraph g;
  g.name = "ladder" + std::to_string(n_cells);
  const int m = n_cells + 1;  // rung positions
  for (int i = 0; i < m; ++i) {
    g.vertex_names.push_back("a" + std::to_string(i));
    g.vertex_names.push_back("b" + std::to_string(i));
  }
  auto a = [](int i) { return 2 * i; };
  auto b = [](int i) { return 2 * i + 1; };
  for (int i = 0; i < n_cells; ++i) {
    g.edges.push_back({a(i), a(i + 1), cell_len});
    g.edges.push_back({b(i), b(i + 1), cell_len});
  }
  for (int i = 0; i < m; ++i) g.edges.push_back({a(i), b(i), rung_len});
  if (dirichlet_caps) {
    g.dirichlet_vertices = {a(0), b(0), a(m - 1), b(m - 1)};
  } else {
    g.halflines = {a(0), b(0), a(m - 1), b(m - 1)};
  }
  return g;
}

std::string MetricGraph::to_json() const {
  nlohmann::json j;
  j["vertices"] = vertex_names;
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges)
    j["edges"].push_back({{"u", vertex_names[e.u]}, {"v", vertex_names[e.v]}, {"len", e.length}});
  j["halflines"] = nlohmann::json::array();
  for (int h : halflines) j["halflines"].push_back(vertex_names[h]);
  if (!dirichlet_vertices.empty()) {
    j["dirichlet"] = nlohmann::json::array();
    for (int d : dirichlet_vertices) j["dirichlet"].push_back(vertex_names[d]);
  }
  if (!name.empty()) j["name"] = name;
  return j.dump(2);
}

MetricGraph MetricGraph::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidParameterError(std::string("graph file is not valid JSON: ") + ex.what());
  }
  MetricGraph g;
  std::map<std::string, int> index;
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw InvalidParameterError("graph file needs a \"vertices\" array");
  for (const auto& v : j["vertices"]) {
    std::string s = v.get<std::string>();
    if (index.count(s)) throw InvalidParameterError("duplicate vertex id " + s);
    index[s] = g.n_vertices();
    g.vertex_names.push_back(s);
  }
  auto vid = [&](const std::string& s) {
    auto it = index.find(s);
    if (it == index.end()) throw InvalidParameterError("unknown vertex id " + s);
    return it->second;
  };
  for (const auto& e : j.value("edges", nlohmann::json::array()))
    g.edges.push_back({vid(e.at("u").get<std::string>()), vid(e.at("v").get<std::string>()),
                       e.at("len").get<double>()});
  for (const auto& h : j.value("halflines", nlohmann::json::array()))
    g.halflines.push_back(vid(h.get<std::string>()));
  for (const auto& d : j.value("dirichlet", nlohmann::json::array()))
    g.dirichlet_vertices.push_back(vid(d.get<std::string>()));
  g.name = j.value("name", std::string{});
  g.validate();
  return g;
}

MetricGraph MetricGraph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameterError("cannot open graph file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace graphnls
