#include "covset/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covset/errors.hpp"
#include "covset/parallel.hpp"

namespace covset {

double PercParams::p() const { return std::exp2(-s); }

void PercParams::validate() const {
  if (d < 1 || d > kMaxDim) throw config_error("percolation: d must lie in [1,4]");
  if (!(s >= 0)) throw config_error("percolation: s must be >= 0");
  if (!(p() > 0.0 && p() <= 1.0)) throw config_error("percolation: p must lie in (0,1]");
  if (depth < 1 || depth > 58) throw config_error("percolation: depth must lie in [1,58]");
}

namespace {

// Children of a level-l cell in the row-major indexing of level l+1.
// For cell coords (c_1..c_d) at level l, children have coords (2c_i + b_i).
inline std::uint64_t child_index(std::uint64_t cell, int d, int level, int combo) {
  // decompose at level `level`, compose at level+1
  std::uint64_t out = 0;
  int shift_in = (d - 1) * level;
  int shift_out = (d - 1) * (level + 1);
  for (int i = 0; i < d; ++i) {
    std::uint64_t ci = (cell >> shift_in) & ((1ull << level) - 1);
    std::uint64_t bit = static_cast<std::uint64_t>((combo >> i) & 1);
    out |= ((ci << 1) | bit) << shift_out;
    shift_in -= level;
    shift_out -= level + 1;
  }
  return out;
}

inline bool cell_alive(const RngStream& root, std::uint32_t replica, int level,
                       std::uint64_t cell, double p) {
  RngStream s = root.at(replica, static_cast<std::uint32_t>(level), cell);
  return s.uniform01() < p;
}

}  // namespace

PercOutcome percolate(const PercParams& params, std::uint32_t replica,
                      const RngStream& root) {
  params.validate();
  const double p = params.p();
  const int d = params.d;
  OccupancyGrid grid = OccupancyGrid::isotropic(d, params.depth);  // checks the cap
  std::vector<std::uint64_t> frontier = {0};  // root cell, always alive
  std::vector<std::uint64_t> next;
  for (int level = 0; level < params.depth && !frontier.empty(); ++level) {
    next.clear();
    for (std::uint64_t cell : frontier) {
      for (int combo = 0; combo < (1 << d); ++combo) {
        std::uint64_t ch = child_index(cell, d, level, combo);
        if (cell_alive(root, replica, level + 1, ch, p)) next.push_back(ch);
      }
    }
    frontier.swap(next);
  }
  for (std::uint64_t cell : frontier) grid.set(cell);
  PercOutcome out{!frontier.empty(), std::move(grid)};
  return out;
}

double extinction_prob_oracle(double p, int arity) {
  if (arity < 2) throw std::invalid_argument("extinction oracle: arity must be >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("extinction oracle: p in (0,1]");
  double q = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    double next = std::pow(1.0 - p + p * q, arity);
    if (std::fabs(next - q) < 1e-12) return next;
    q = next;
  }
  return q;
}

double extinction_prob_depth(double p, int arity, int m) {
  double q = 0.0;
  for (int i = 0; i < m; ++i) q = std::pow(1.0 - p + p * q, arity);
  return q;
}

SurvivalStats survival_frequency(const PercParams& params, int replicas,
                                 const RngStream& root, int threads,
                                 int frontier_cap) {
  params.validate();
  if (replicas < 1) throw config_error("replicas must be >= 1");
  if (frontier_cap < 1) throw config_error("frontier cap must be >= 1");
  const double p = params.p();
  const int d = params.d;
  std::vector<std::uint8_t> survived(static_cast<std::size_t>(replicas), 0);
  parallel_for(replicas, threads, [&](int rep) {
    auto r = static_cast<std::uint32_t>(rep);
    std::vector<std::uint64_t> frontier = {0};
    std::vector<std::uint64_t> next;
    for (int level = 0; level < params.depth && !frontier.empty(); ++level) {
      next.clear();
      for (std::uint64_t cell : frontier) {
        for (int combo = 0; combo < (1 << d); ++combo) {
          std::uint64_t ch = child_index(cell, d, level, combo);
          if (cell_alive(root, r, level + 1, ch, p)) next.push_back(ch);
        }
        if (static_cast<int>(next.size()) >= frontier_cap) break;
      }
      if (static_cast<int>(next.size()) > frontier_cap) next.resize(static_cast<std::size_t>(frontier_cap));
      frontier.swap(next);
    }
    survived[static_cast<std::size_t>(rep)] = !frontier.empty();
  });
  SurvivalStats st;
  st.replicas = replicas;
  for (auto s : survived) st.survived += s;
  st.frequency = static_cast<double>(st.survived) / replicas;
  return st;
}

PercIntersectResult perc_intersect_dim(const PercParams& params,
                                       const OccupancyGrid& e_grid, int replicas,
                                       const RngStream& root, int threads) {
  params.validate();
  if (replicas < 1) throw config_error("replicas must be >= 1");
  if (e_grid.dim() != params.d || !e_grid.is_isotropic() ||
      e_grid.iso_depth() != params.depth)
    throw std::invalid_argument("grid depth mismatch");
  const double p = params.p();
  const int d = params.d;
  // Coarsenings of E: the walk is pruned to cells meeting E, which does not
  // change the law of the intersection at depth m.
  std::vector<OccupancyGrid> e_levels;
  e_levels.reserve(static_cast<std::size_t>(params.depth) + 1);
  e_levels.push_back(e_grid);
  for (int l = params.depth; l > 0; --l) e_levels.push_back(e_levels.back().coarsened());
  std::reverse(e_levels.begin(), e_levels.end());  // e_levels[l] at depth l

  const int jlo = params.depth / 2;
  std::vector<std::optional<DimEstimate>> per(static_cast<std::size_t>(replicas));
  std::vector<std::uint8_t> nonempty(static_cast<std::size_t>(replicas), 0);
  parallel_for(replicas, threads, [&](int rep) {
    auto r = static_cast<std::uint32_t>(rep);
    std::vector<std::uint64_t> frontier = {0};
    std::vector<std::uint64_t> next;
    for (int level = 0; level < params.depth && !frontier.empty(); ++level) {
      next.clear();
      for (std::uint64_t cell : frontier) {
        for (int combo = 0; combo < (1 << d); ++combo) {
          std::uint64_t ch = child_index(cell, d, level, combo);
          if (!e_levels[static_cast<std::size_t>(level + 1)].test(ch)) continue;
          if (cell_alive(root, r, level + 1, ch, p)) next.push_back(ch);
        }
      }
      frontier.swap(next);
    }
    if (frontier.empty()) return;
    nonempty[static_cast<std::size_t>(rep)] = 1;
    OccupancyGrid g = OccupancyGrid::isotropic(d, params.depth);
    for (std::uint64_t cell : frontier) g.set(cell);
    per[static_cast<std::size_t>(rep)] = box_dim_estimate(g, jlo, params.depth);
  });
  PercIntersectResult res;
  res.replicas = replicas;
  res.per_replica = std::move(per);
  std::vector<double> slopes;
  for (int i = 0; i < replicas; ++i) {
    res.nonempty += nonempty[static_cast<std::size_t>(i)];
    if (res.per_replica[static_cast<std::size_t>(i)])
      slopes.push_back(res.per_replica[static_cast<std::size_t>(i)]->slope);
  }
  res.frequency = static_cast<double>(res.nonempty) / replicas;
  res.ci = wilson95(static_cast<std::uint64_t>(res.nonempty),
                    static_cast<std::uint64_t>(replicas));
  if (!slopes.empty()) {
    res.median_slope = median(slopes);
    std::sort(slopes.begin(), slopes.end());
    auto quant = [&](double q) {
      double pos = q * static_cast<double>(slopes.size() - 1);
      std::size_t i = static_cast<std::size_t>(pos);
      double frac = pos - static_cast<double>(i);
      return i + 1 >= slopes.size() ? slopes.back()
                                    : slopes[i] * (1 - frac) + slopes[i + 1] * frac;
    };
    res.iqr_lo = quant(0.25);
    res.iqr_hi = quant(0.75);
  }
  return res;
}

}  // namespace covset
