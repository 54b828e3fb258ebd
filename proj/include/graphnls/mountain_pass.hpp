#pragma once

#include <utility>
#include <vector>

#include "graphnls/discretization.hpp"

namespace graphnls {

/// A discrete path on the mass sphere: an ordered list of equal-mass beads.
/// `mu_param` is the soliton scaling parameter used by the builders; the
/// actual squared-L2 mass of every bead is `mass` (= mu_param * ||phi_1||_2^2
/// for the closed-form constructions).
struct PathOnSphere {
  std::vector<GridFunction> beads;
  std::vector<double> s_values;  // scaling factor of each bead (builders only)
  double mass = 0;               // common squared-L2 mass of the beads
  double mu_param = 0;
  double rho = 1;
  double p = 0;
  double delta = 0;  // A_delta threshold chosen at construction
};

struct MPConfig {
  int n_beads = 64;
  double delta = -1;          // < 0: half the gradsq of the initial start bead
  double eps_p = -1;          // < 0: a_p / 8, then auto-halved until A_delta holds
  double s_end_margin = 1.2;  // extend past the E_{1/2} < 0 threshold by this factor
  int relax_iters = 60;
  double descent_step = 0.02;  // fraction of the sphere radius per move

  /// Flattening-scale constant ((p-2)/4)^{2/(p-6)}.
  static double a_p(double p);
  /// Scaling s beyond which E_{1/2}(sqrt(s) phi(s x)) < 0: ((p-2) rho / 2)^{2/(p-6)}.
  static double b_endpoint_scale(double p, double rho);
};

/// Scaling path sqrt(s) phi_{mu,rho}(s x) on the line graph (two half-lines
/// glued at one vertex), with s running from eps_p past the B-membership scale.
PathOnSphere canonical_line_path(const DiscPtr& disc, double mu_param, double rho,
                                 double p, const MPConfig& cfg);

/// Canonical path transplanted onto the line formed by two half-lines attached
/// to the same vertex; the generic construction for graphs satisfying
/// assumption (H), e.g. star graphs. The spike is centered at
/// pair_center_offset(disc, h1) along h1 (not at the shared vertex), so the
/// trace on the remaining components is exponentially negligible; meshes
/// should refine around that point.
PathOnSphere halfline_pair_path(const DiscPtr& disc, int h0, int h1, double mu_param,
                                double rho, double p, const MPConfig& cfg);

/// Center of the spikes used by halfline_pair_path: one third of the truncated
/// length of the carrier half-line h1.
double pair_center_offset(const DiscPtr& disc, int h1);

/// Restriction to the half-line graph of the mass-doubled canonical path
/// (peak at the vertex); its level is 2^{2 beta} times the line level.
PathOnSphere halfline_restriction_path(const DiscPtr& disc, double mu_param, double rho,
                                       double p, const MPConfig& cfg);

/// Canonical path compactly supported on one finite edge of length 4l: soliton
/// bulk on the middle half, linear tapers on the outer quarters, renormalized.
/// Sets *taper_warning when the taper correction exceeds 20% of the level.
PathOnSphere edge_supported_path(const DiscPtr& disc, int edge_id, double mu_param,
                                 double rho, double p, const MPConfig& cfg,
                                 bool* taper_warning = nullptr);

/// Path peaked at a degree-1 tip: the mass-doubled flattening soliton sampled
/// radially over the whole graph from the tip. Near s = 1 the spike is
/// exponentially confined to the pendant edge; near s = 0 the profile spreads
/// so the gradient can reach A_delta.
PathOnSphere pendant_path(const DiscPtr& disc, double mu_param, double rho, double p,
                          const MPConfig& cfg);

/// Loop-traversal path for signpost/tadpole graphs: soliton bulk on the
/// loop (identified with [-l, l]), half-speed traversal along the stem or
/// half-line, tapered at a bounded stem's far end.
PathOnSphere signpost_path(const DiscPtr& disc, double mu_param, double rho, double p,
                           const MPConfig& cfg);

/// (max bead energy, argmax index).
std::pair<double, int> path_max_energy(const PathOnSphere& path);

struct EndpointCheck {
  bool start_in_A_delta = false;  // ||u'||^2 <= delta
  bool end_in_B = false;          // E_{1/2}(u) < 0
  double start_gradsq = 0;
  double end_E_half = 0;
};
EndpointCheck check_endpoints(const PathOnSphere& path);

struct RelaxResult {
  PathOnSphere path;
  double level = 0;
  int argmax_index = 0;
  bool stalled = false;
  int iterations = 0;
};

/// String-method min-max relaxation: tangent descent of the interior beads,
/// mass re-projection, energy-arclength reparametrization; endpoints fixed,
/// max energy nonincreasing (backoff-enforced).
RelaxResult minmax_relax(const PathOnSphere& path, const MPConfig& cfg);

/// Graded mesh options resolving the path's soliton spikes at the given
/// centers; h_min tracks the width of the sharpest bead.
MeshOptions spike_mesh_options(double p, double mu_param, double rho, double h_max,
                               double L, const std::vector<GraphPoint>& centers);

///// Convenience for the line / half-line graphs: spikes sit at the vertex and
/// L is chosen to capture the flattest bead's tails.
MeshOptions line_path_mesh_options(const MetricGraph& g, double p, double mu_param,
                                   double rho, double h_max);

}  // namespace graphnls
