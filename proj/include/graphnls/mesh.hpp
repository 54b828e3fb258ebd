#pragma once

#include <vector>

#include "graphnls/metric_graph.hpp"

namespace graphnls {

/// Where to refine: a point on a finite edge or a half-line, with the
/// smallest element size wanted there. Elements grow geometrically away
/// from the center until they reach h_max.
struct RefineSpec {
  bool on_halfline = false;
  int index = 0;    // edge index or half-line index
  double center = 0;  // local coordinate of the spike
  double h_min = 0;
};

struct MeshOptions {
  double h_max = 0.01;
  double L = 30.0;        // half-line truncation length
  // Geometric growth ratio away from refine centers. Spacing grows like
  // x * ln(grading) with distance x, so this ratio (not h_min) bounds the
  // relative quadrature bias near a spike.
  double grading = 1.05;
  std::vector<RefineSpec> refine;
};

/// 1-D grid on one finite edge. x holds local coordinates (0 .. length,
/// both ends included); node[i] is the global unknown index of x[i].
struct EdgeGrid {
  std::vector<double> x;
  std::vector<int> node;
};

/// Grid on a truncated half-line (0 at the vertex, L at the Dirichlet cap;
/// the cap node has global index -1 and is excluded from the unknowns).
struct HalflineGrid {
  std::vector<double> x;
  std::vector<int> node;
  double L = 0;
};

/// Per-edge grids glued at shared vertex nodes. Immutable after build.
struct Mesh {
  MetricGraph graph;
  std::vector<EdgeGrid> edges;
  std::vector<HalflineGrid> halflines;
  std::vector<int> vertex_node;  // -1 for Dirichlet vertices
  int n_nodes = 0;
  MeshOptions options;

  int n_elements() const;
  double total_length() const;  // finite edges + truncated half-lines
};

Mesh build_mesh(const MetricGraph& g, double h_max, double L);
Mesh build_mesh(const MetricGraph& g, const MeshOptions& opt);

}  // namespace graphnls
