#pragma once

// Fractal percolation on the dyadic cube tree of the torus: each depth-(j+1)
// child of a live cell survives independently with probability p = 2^-s.

#include <cstdint>
#include <optional>
#include <vector>

#include "covset/coversim.hpp"
#include "covset/grid.hpp"
#include "covset/sampler.hpp"

namespace covset {

struct PercParams {
  int d = 1;
  double s = 0.5;
  int depth = 20;

  double p() const;  // 2^-s
  void validate() const;
};

struct PercOutcome {
  bool survived = false;
  OccupancyGrid grid;  // live cells at depth m
};

PercOutcome percolate(const PercParams& params, std::uint32_t replica,
                      const RngStream& root);

// Smallest fixed point of q = (1 - p + p q)^arity (extinction probability).
double extinction_prob_oracle(double p, int arity);
// m-step iterate from 0: extinction by depth m.
double extinction_prob_depth(double p, int arity, int m);

struct SurvivalStats {
  int replicas = 0;
  int survived = 0;
  double frequency = 0;
};

// Survival frequency via a frontier walk that never materializes grids, so
// the depth may exceed the grid cap. The frontier is capped at `frontier_cap`
// live cells per level; the induced error is at most q^cap < 1e-10 for the
// regimes of interest.
SurvivalStats survival_frequency(const PercParams& params, int replicas,
                                 const RngStream& root, int threads,
                                 int frontier_cap = 64);

struct PercIntersectResult {
  int replicas = 0;
  int nonempty = 0;
  double frequency = 0;
  WilsonInterval ci;
  double median_slope = 0;
  double iqr_lo = 0, iqr_hi = 0;
  std::vector<std::optional<DimEstimate>> per_replica;
};

// Intersect percolation with a fixed occupancy grid E (the walk is pruned to
// the coarsenings of E, which leaves the intersection law unchanged); report
// the non-empty frequency and the median box-count slope of survivors over
// j in [depth/2, depth].
PercIntersectResult perc_intersect_dim(const PercParams& params,
                                       const OccupancyGrid& e_grid, int replicas,
                                       const RngStream& root, int threads);

}  // namespace covset
