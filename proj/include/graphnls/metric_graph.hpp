#pragma once

#include <string>
#include <vector>

namespace graphnls {

/// A bounded edge between two vertices. Loops (u == v) are allowed.
struct FiniteEdge {
  int u = 0;
  int v = 0;
  double length = 0.0;
  bool is_loop() const { return u == v; }
};

/// Combinatorial + metric description of a graph whose edges are intervals
/// or half-lines glued at vertices. Immutable after construction.
struct MetricGraph {
  std::vector<std::string> vertex_names;
  std::vector<FiniteEdge> edges;
  std::vector<int> halflines;           // attachment vertex of each half-line
  std::vector<int> dirichlet_vertices;  // vertices clamped to zero (truncation caps)
  std::string name;

  int n_vertices() const { return static_cast<int>(vertex_names.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_halflines() const { return static_cast<int>(halflines.size()); }

  /// Edge-end count at a vertex: loops contribute 2, half-lines 1.
  int degree(int v) const;
  int halflines_at(int v) const;
  bool is_compact() const { return halflines.empty(); }

  /// Sum of finite edge lengths (the compact core |K|).
  double compact_core_length() const;
  /// Shortest finite edge, +inf when there is none.
  double min_edge_length() const;

  /// Throws InvalidParameterError on the first violated invariant.
  void validate() const;

  std::string to_json() const;
  static MetricGraph from_json(const std::string& text);
  static MetricGraph load(const std::string& path);
};

/// Topological features the existence theory keys on.
struct TopologyReport {
  bool has_pendant = false;
  bool has_signpost = false;
  int n_halflines = 0;
  bool every_vertex_even_halflines = false;
  bool satisfies_H = false;
  double compact_core_length = 0.0;
};

TopologyReport classify(const MetricGraph& g);

double min_edge_length(const MetricGraph& g);

// Standard builders.
MetricGraph make_line();
MetricGraph make_halfline();
MetricGraph make_star(int k);
MetricGraph make_tadpole(double loop_len);
MetricGraph make_tgraph(double pendant_len);
MetricGraph make_signpost(double loop_len, double stem_len, int extra_halflines);
/// n-cell truncation of the periodic ladder: two rails of n_cells edges,
/// n_cells+1 rungs, rail ends capped by half-lines (or Dirichlet vertices).
MetricGraph make_ladder(double cell_len, double rung_len, int n_cells,
                        bool dirichlet_caps = false);

}  // namespace graphnls
