#pragma once

// Finite-depth covering-set simulation: generation rasterization, the
// limsup proxy (intersection over generation-bucket unions), box-counting
// dimension estimates, hitting frequencies and intersection dimensions
// against analytic targets, and the 1-d projection counting experiment.

#include <cstdint>
#include <optional>
#include <vector>

#include "covset/geometry.hpp"
#include "covset/grid.hpp"
#include "covset/radii.hpp"
#include "covset/sampler.hpp"
#include "covset/targets.hpp"

namespace covset {

struct ShapeFamily {
  ShapeKind kind = ShapeKind::Ball;
  std::optional<SnowflakeExponents> H;  // required for rectangle kinds

  GeneratingShape shape(double r, const Rotation* rot) const;
};

struct SimWindow {
  int d = 1;
  int m0 = 6, m1 = 14;  // generation range
  int depth = 16;       // grid depth
  ShapeFamily family;
  RadiusSequence seq;
  bool rotations = false;

  SimWindow(int d, int m0, int m1, int depth, ShapeFamily family,
            RadiusSequence seq, bool rotations = false);
  void validate() const;
};

struct Placement {
  TorusPoint x;
  double r = 0;
  Rotation rot;  // identity when not rotated
  bool rotated = false;
};

// Path-keyed draws for generation k: placement j uses stream (replica, k, j).
std::vector<Placement> draw_generation(const SimWindow& window, int k,
                                       std::uint32_t replica,
                                       const RngStream& root);

void rasterize_placement(OccupancyGrid& grid, const ShapeFamily& family,
                         const Placement& p);

// Union of the generation-k generators on a depth-`depth` grid
// (depth < 0 means window.depth).
OccupancyGrid generation_rasterize(const SimWindow& window, int k,
                                   std::uint32_t replica, const RngStream& root,
                                   int depth = -1);

// Bitwise AND over generations k = m0..m1. The infinite-window version of
// this set is a subset of E(x); finite truncation makes each factor a
// superset of its infinite-tail counterpart.
OccupancyGrid limsup_proxy(const SimWindow& window, std::uint32_t replica,
                           const RngStream& root);

// AND of per-generation unions built from explicit placements (oracle tests).
OccupancyGrid proxy_from_placements(
    int d, int depth, const ShapeFamily& family,
    const std::vector<std::vector<Placement>>& generations);

struct DimEstimate {
  double slope = 0;
  double intercept = 0;
  double residual_rms = 0;
  int jmin = 0, jmax = 0;
  std::vector<int> js;
  std::vector<std::uint64_t> counts;  // N_j per j
};

// Least-squares slope of log2 N_j vs j, N_j from coarsening the grid.
DimEstimate box_dim_estimate(const OccupancyGrid& grid, int jmin, int jmax);

// Slope of log2 counts over explicit (j, N_j) pairs (zero counts dropped).
DimEstimate regress_counts(const std::vector<int>& js,
                           const std::vector<std::uint64_t>& counts);

bool hit_test(const OccupancyGrid& e_grid, const OccupancyGrid& f_grid);

struct WilsonInterval {
  double lo = 0, hi = 0;
};
WilsonInterval wilson95(std::uint64_t hits, std::uint64_t n);

// Scale-matched covering-set box counts: N_j = occupied cells of the
// generation-j union rasterized at depth j, for j = m0..m1. The counts track
// n_j ~ 2^{alpha j}, so the regression slope estimates dim E. (The plain
// AND-proxy degenerates for alpha < t and cannot carry a dimension estimate;
// see the README notes on estimators.)
DimEstimate cover_dim_replica(const SimWindow& window, std::uint32_t replica,
                              const RngStream& root);

struct CoverDimResult {
  std::vector<DimEstimate> per_replica;
  double median_slope = 0;
  double iqr_lo = 0, iqr_hi = 0;
  // AND-proxy diagnostics at window.depth
  std::vector<double> proxy_fraction;
};

CoverDimResult cover_dim(const SimWindow& window, int replicas,
                         const RngStream& root, int threads);

struct HitFrequencyResult {
  int replicas = 0;
  int sustained_hits = 0;   // every window generation meets the target raster
  int common_cell_hits = 0; // AND-proxy itself meets the target raster
  int empty_proxies = 0;
  double frequency = 0;     // sustained
  WilsonInterval ci;
  double frequency_common = 0;
  WilsonInterval ci_common;
};

// Sustained-hit frequency: a replica counts as a hit when every generation
// k in [m0, m1] has some generator meeting the target raster. The common-cell
// variant additionally demands a single cell shared by all generations and
// the target (the AND-proxy hit).
HitFrequencyResult hitting_frequency(const SimWindow& window, const TargetSet& F,
                                     int replicas, const RngStream& root,
                                     int threads);

struct IntersectionDimResult {
  int replicas = 0;
  int nonempty = 0;
  double median_slope = 0;
  double iqr_lo = 0, iqr_hi = 0;
  std::vector<std::optional<DimEstimate>> per_replica;
};

// Scale-matched intersection counts N_j = |raster_j(U_j) AND raster_j(F)|
// regressed over j in [max(m0, depth/2), m1]; median slope over replicas with
// a non-degenerate fit. Requires a hitting regime (checked via the predictor).
IntersectionDimResult intersection_dim(const SimWindow& window, const TargetSet& F,
                                       int replicas, const RngStream& root,
                                       int threads);

struct ProjectionCountParams {
  double b = 0.37;          // line height
  std::uint64_t n_max = 1000000;
  int k_min = 0, k_max = 64;  // generation filter
};

// Counts n <= n_max (restricted to generations [k_min, k_max]) whose
// y-projection interval of x_n + A_n covers the line height b. Exact law,
// simulated by majorant skip-sampling (one Bernoulli(p_n) per index without
// touching every n).
std::vector<std::uint32_t> projection_hit_counts(const SimWindow& window,
                                                 const ProjectionCountParams& params,
                                                 int replicas, const RngStream& root,
                                                 int threads);

// Direct per-index reference implementation (small n_max; used by tests).
std::uint32_t projection_hit_count_direct(const SimWindow& window,
                                          const ProjectionCountParams& params,
                                          std::uint32_t replica,
                                          const RngStream& root);

double median(std::vector<double> v);

}  // namespace covset
