#include "covset/coversim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covset/errors.hpp"
#include "covset/parallel.hpp"
#include "covset/predictor.hpp"

namespace covset {

GeneratingShape ShapeFamily::shape(double r, const Rotation* rot) const {
  switch (kind) {
    case ShapeKind::Ball:
      return GeneratingShape::ball(r);
    case ShapeKind::AxisRect:
      if (!H) throw std::invalid_argument("shape family: exponents required");
      return GeneratingShape::axis_rect(*H, r);
    case ShapeKind::RotatedRect:
      if (!H) throw std::invalid_argument("shape family: exponents required");
      if (!rot) throw std::invalid_argument("shape family: rotation required");
      return GeneratingShape::rotated_rect(*H, r, *rot);
  }
  throw std::logic_error("unreachable");
}

SimWindow::SimWindow(int d_, int m0_, int m1_, int depth_, ShapeFamily family_,
                     RadiusSequence seq_, bool rotations_)
    : d(d_), m0(m0_), m1(m1_), depth(depth_), family(std::move(family_)),
      seq(std::move(seq_)), rotations(rotations_) {
  validate();
}

void SimWindow::validate() const {
  if (d < 1 || d > kMaxDim) throw config_error("window: d must lie in [1,4]");
  if (m0 < 1) throw config_error("window: m0 must be >= 1 (so that r < 1/2)");
  if (m0 > m1) throw config_error("window: need m0 <= m1");
  if (m1 > depth) throw config_error("window: need m1 <= depth");
  if (family.kind != ShapeKind::Ball) {
    if (!family.H) throw config_error("window: rectangle family needs exponents H");
    if (family.H->dim() != d) throw config_error("window: exponents dimension mismatch");
  }
  if (rotations && d != 2 && d != 3)
    throw config_error("window: rotations require d in {2,3}");
  // fail fast on the memory cap
  OccupancyGrid probe = OccupancyGrid::isotropic(d, depth);
  (void)probe;
}

std::vector<Placement> draw_generation(const SimWindow& window, int k,
                                       std::uint32_t replica,
                                       const RngStream& root) {
  auto [first, last] = bucket_bounds(window.seq, k);
  std::vector<Placement> out;
  if (first > last) return out;
  std::uint64_t n_k = last - first + 1;
  if (n_k > limits::max_enumeration())
    throw resource_limit_error("generation bucket exceeds the index cap");
  out.reserve(static_cast<std::size_t>(n_k));
  bool want_rot = window.rotations && window.family.kind == ShapeKind::RotatedRect;
  for (std::uint64_t j = 0; j < n_k; ++j) {
    RngStream s = root.at(replica, static_cast<std::uint32_t>(k), j);
    Placement p;
    p.x = s.uniform_point(window.d);
    p.r = window.seq.at(first + j);
    if (want_rot) {
      RngStream rs = s.derive(1);
      p.rot = rs.haar_rotation(window.d);
      p.rotated = true;
    } else {
      p.rot = Rotation::identity(window.d);
    }
    out.push_back(p);
  }
  return out;
}

void rasterize_placement(OccupancyGrid& grid, const ShapeFamily& family,
                         const Placement& p) {
  const int d = grid.dim();
  const int m = grid.iso_depth();
  GeneratingShape shape = family.shape(p.r, p.rotated ? &p.rot : nullptr);
  auto bb = shape.bounding_half_widths(d);
  // candidate index ranges per coordinate (wrapped)
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  const auto scale = static_cast<double>(1ull << m);
  for (int i = 0; i < d; ++i) {
    double a = p.x[i] - bb[static_cast<std::size_t>(i)];
    double b = p.x[i] + bb[static_cast<std::size_t>(i)];
    lo[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor((a + 0.5) * scale));
    hi[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor((b + 0.5) * scale));
    if (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1 >=
        static_cast<std::int64_t>(1ull << m)) {
      lo[static_cast<std::size_t>(i)] = 0;
      hi[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(1ull << m) - 1;
    }
  }
  const std::uint32_t mask = static_cast<std::uint32_t>((1ull << m) - 1);
  std::array<std::uint32_t, kMaxDim> cell{};
  std::array<std::int64_t, kMaxDim> it = lo;
  while (true) {
    for (int i = 0; i < d; ++i)
      cell[static_cast<std::size_t>(i)] =
          static_cast<std::uint32_t>(it[static_cast<std::size_t>(i)]) & mask;
    if (shape_cell_intersects(shape, p.x, m,
                              std::span<const std::uint32_t>(cell.data(),
                                                             static_cast<std::size_t>(d))))
      grid.set_cell(std::span<const std::uint32_t>(cell.data(), static_cast<std::size_t>(d)));
    int i = d - 1;
    while (i >= 0) {
      if (++it[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]) break;
      it[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) break;
  }
}

OccupancyGrid generation_rasterize(const SimWindow& window, int k,
                                   std::uint32_t replica, const RngStream& root,
                                   int depth) {
  if (k < window.m0 || k > window.m1)
    throw std::invalid_argument("generation outside the window");
  int m = depth < 0 ? window.depth : depth;
  OccupancyGrid grid = OccupancyGrid::isotropic(window.d, m);
  for (const Placement& p : draw_generation(window, k, replica, root))
    rasterize_placement(grid, window.family, p);
  return grid;
}

OccupancyGrid limsup_proxy(const SimWindow& window, std::uint32_t replica,
                           const RngStream& root) {
  OccupancyGrid acc = generation_rasterize(window, window.m0, replica, root);
  for (int k = window.m0 + 1; k <= window.m1; ++k)
    acc.and_with(generation_rasterize(window, k, replica, root));
  return acc;
}

OccupancyGrid proxy_from_placements(
    int d, int depth, const ShapeFamily& family,
    const std::vector<std::vector<Placement>>& generations) {
  if (generations.empty()) throw std::invalid_argument("no generations");
  OccupancyGrid acc = OccupancyGrid::isotropic(d, depth);
  bool first = true;
  for (const auto& gen : generations) {
    OccupancyGrid g = OccupancyGrid::isotropic(d, depth);
    for (const auto& p : gen) rasterize_placement(g, family, p);
    if (first) {
      acc = std::move(g);
      first = false;
    } else {
      acc.and_with(g);
    }
  }
  return acc;
}

DimEstimate regress_counts(const std::vector<int>& js,
                           const std::vector<std::uint64_t>& counts) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < js.size(); ++i) {
    if (counts[i] == 0) continue;
    xs.push_back(js[i]);
    ys.push_back(std::log2(static_cast<double>(counts[i])));
  }
  if (xs.size() < 2)
    throw degenerate_outcome_error("not enough non-empty scales for a slope");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  DimEstimate e;
  e.slope = (n * sxy - sx * sy) / denom;
  e.intercept = (sy - e.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double resid = ys[i] - (e.slope * xs[i] + e.intercept);
    ss += resid * resid;
  }
  e.residual_rms = std::sqrt(ss / n);
  e.jmin = js.front();
  e.jmax = js.back();
  e.js = js;
  e.counts = counts;
  return e;
}

DimEstimate box_dim_estimate(const OccupancyGrid& grid, int jmin, int jmax) {
  if (!grid.is_isotropic())
    throw std::invalid_argument("box_dim_estimate: isotropic grids only");
  int m = grid.iso_depth();
  if (!(jmin < jmax && jmax <= m))
    throw std::invalid_argument("box_dim_estimate: need jmin < jmax <= depth");
  if (grid.empty())
    throw std::invalid_argument("empty set has no dimension estimate");
  std::vector<int> js;
  std::vector<std::uint64_t> counts;
  OccupancyGrid cur = grid;
  for (int j = m;; --j) {
    if (j <= jmax) {
      js.push_back(j);
      counts.push_back(cur.count());
    }
    if (j == jmin) break;
    cur = cur.coarsened();
  }
  std::reverse(js.begin(), js.end());
  std::reverse(counts.begin(), counts.end());
  return regress_counts(js, counts);
}

bool hit_test(const OccupancyGrid& e_grid, const OccupancyGrid& f_grid) {
  return e_grid.intersects(f_grid);
}

WilsonInterval wilson95(std::uint64_t hits, std::uint64_t n) {
  if (n == 0) return {0, 1};
  const double z = 1.959963984540054;
  double phat = static_cast<double>(hits) / static_cast<double>(n);
  double nn = static_cast<double>(n);
  double denom = 1 + z * z / nn;
  double center = (phat + z * z / (2 * nn)) / denom;
  double rad = z * std::sqrt(phat * (1 - phat) / nn + z * z / (4 * nn * nn)) / denom;
  return {std::max(0.0, center - rad), std::min(1.0, center + rad)};
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

static double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0;
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t i = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(i);
  if (i + 1 >= v.size()) return v.back();
  return v[i] * (1 - frac) + v[i + 1] * frac;
}

DimEstimate cover_dim_replica(const SimWindow& window, std::uint32_t replica,
                              const RngStream& root) {
  std::vector<int> js;
  std::vector<std::uint64_t> counts;
  for (int j = window.m0; j <= window.m1; ++j) {
    OccupancyGrid g = generation_rasterize(window, j, replica, root, j);
    js.push_back(j);
    counts.push_back(g.count());
  }
  return regress_counts(js, counts);
}

CoverDimResult cover_dim(const SimWindow& window, int replicas,
                         const RngStream& root, int threads) {
  if (replicas < 1) throw config_error("replicas must be >= 1");
  CoverDimResult res;
  res.per_replica.resize(static_cast<std::size_t>(replicas));
  res.proxy_fraction.resize(static_cast<std::size_t>(replicas));
  parallel_for(replicas, threads, [&](int rep) {
    auto r = static_cast<std::uint32_t>(rep);
    res.per_replica[static_cast<std::size_t>(rep)] = cover_dim_replica(window, r, root);
    res.proxy_fraction[static_cast<std::size_t>(rep)] =
        limsup_proxy(window, r, root).occupied_fraction();
  });
  std::vector<double> slopes;
  for (const auto& e : res.per_replica) slopes.push_back(e.slope);
  res.median_slope = median(slopes);
  std::sort(slopes.begin(), slopes.end());
  res.iqr_lo = quantile_sorted(slopes, 0.25);
  res.iqr_hi = quantile_sorted(slopes, 0.75);
  return res;
}

HitFrequencyResult hitting_frequency(const SimWindow& window, const TargetSet& F,
                                     int replicas, const RngStream& root,
                                     int threads) {
  if (replicas < 1) throw config_error("replicas must be >= 1");
  if (F.dim() != window.d) throw config_error("target dimension mismatch");
  OccupancyGrid f_grid = F.rasterize(window.depth);
  std::vector<std::uint8_t> sustained(static_cast<std::size_t>(replicas), 0);
  std::vector<std::uint8_t> common(static_cast<std::size_t>(replicas), 0);
  std::vector<std::uint8_t> empty_proxy(static_cast<std::size_t>(replicas), 0);
  parallel_for(replicas, threads, [&](int rep) {
    auto r = static_cast<std::uint32_t>(rep);
    bool all_gens_hit = true;
    OccupancyGrid proxy = OccupancyGrid::isotropic(window.d, window.depth);
    proxy.fill();
    for (int k = window.m0; k <= window.m1; ++k) {
      OccupancyGrid g = generation_rasterize(window, k, r, root);
      if (!g.intersects(f_grid)) all_gens_hit = false;
      proxy.and_with(g);
    }
    sustained[static_cast<std::size_t>(rep)] = all_gens_hit;
    common[static_cast<std::size_t>(rep)] = proxy.intersects(f_grid);
    empty_proxy[static_cast<std::size_t>(rep)] = proxy.empty();
  });
  HitFrequencyResult res;
  res.replicas = replicas;
  for (int i = 0; i < replicas; ++i) {
    res.sustained_hits += sustained[static_cast<std::size_t>(i)];
    res.common_cell_hits += common[static_cast<std::size_t>(i)];
    res.empty_proxies += empty_proxy[static_cast<std::size_t>(i)];
  }
  res.frequency = static_cast<double>(res.sustained_hits) / replicas;
  res.ci = wilson95(static_cast<std::uint64_t>(res.sustained_hits),
                    static_cast<std::uint64_t>(replicas));
  res.frequency_common = static_cast<double>(res.common_cell_hits) / replicas;
  res.ci_common = wilson95(static_cast<std::uint64_t>(res.common_cell_hits),
                           static_cast<std::uint64_t>(replicas));
  return res;
}

IntersectionDimResult intersection_dim(const SimWindow& window, const TargetSet& F,
                                       int replicas, const RngStream& root,
                                       int threads) {
  if (replicas < 1) throw config_error("replicas must be >= 1");
  if (F.dim() != window.d) throw config_error("target dimension mismatch");
  // regime pre-check against the predictor (balls: t = d)
  if (window.family.kind == ShapeKind::Ball) {
    double t = static_cast<double>(window.d);
    double alpha = alpha_of(window.seq, t).value;
    bool cond_c = false;
    if (window.seq.generative())
      cond_c = condition_c_check(window.seq, t, 32).status == ConditionCStatus::Holds;
    RegimeVerdict v = classify_hitting(t, alpha, F.dim_h(), F.dim_p(), cond_c);
    if (v.regime != Regime::HitHausdorff && v.regime != Regime::HitPacking)
      throw config_error(std::string("intersection_dim requires a hitting regime, got ") +
                         regime_name(v.regime));
  }
  int jlo = std::max(window.m0, window.depth / 2);
  std::vector<OccupancyGrid> f_grids;
  for (int j = jlo; j <= window.m1; ++j) f_grids.push_back(F.rasterize(j));
  IntersectionDimResult res;
  res.replicas = replicas;
  res.per_replica.resize(static_cast<std::size_t>(replicas));
  parallel_for(replicas, threads, [&](int rep) {
    auto r = static_cast<std::uint32_t>(rep);
    std::vector<int> js;
    std::vector<std::uint64_t> counts;
    for (int j = jlo; j <= window.m1; ++j) {
      OccupancyGrid g = generation_rasterize(window, j, r, root, j);
      std::uint64_t n = g.intersection_count(f_grids[static_cast<std::size_t>(j - jlo)]);
      js.push_back(j);
      counts.push_back(n);
    }
    int nonzero = 0;
    for (auto c : counts) nonzero += c > 0;
    if (nonzero >= 3) {
      res.per_replica[static_cast<std::size_t>(rep)] = regress_counts(js, counts);
    }
  });
  std::vector<double> slopes;
  for (const auto& e : res.per_replica)
    if (e) slopes.push_back(e->slope);
  res.nonempty = static_cast<int>(slopes.size());
  if (slopes.empty())
    throw degenerate_outcome_error(
        "no intersections observed — window too shallow or regime misclassified");
  res.median_slope = median(slopes);
  std::sort(slopes.begin(), slopes.end());
  res.iqr_lo = quantile_sorted(slopes, 0.25);
  res.iqr_hi = quantile_sorted(slopes, 0.75);
  return res;
}

namespace {

double projection_halfwidth(const SimWindow& window, double r) {
  if (window.family.kind == ShapeKind::Ball) return r;
  const auto& H = *window.family.H;
  return 0.5 * std::pow(r, 1.0 / H.h(H.dim() - 1));
}

}  // namespace

std::uint32_t projection_hit_count_direct(const SimWindow& window,
                                          const ProjectionCountParams& params,
                                          std::uint32_t replica,
                                          const RngStream& root) {
  std::uint32_t count = 0;
  for (int k = params.k_min; k <= params.k_max; ++k) {
    auto [first, last] = bucket_bounds(window.seq, k);
    if (first > last) continue;
    if (first > params.n_max) break;
    last = std::min<std::uint64_t>(last, params.n_max);
    for (std::uint64_t n = first; n <= last; ++n) {
      RngStream s = root.at(replica, static_cast<std::uint32_t>(k), n - first);
      TorusPoint x = s.uniform_point(window.d);
      double half = projection_halfwidth(window, window.seq.at(n));
      if (torus_dist1(x[window.d - 1], params.b) <= half) ++count;
    }
  }
  return count;
}

std::vector<std::uint32_t> projection_hit_counts(const SimWindow& window,
                                                 const ProjectionCountParams& params,
                                                 int replicas, const RngStream& root,
                                                 int threads) {
  if (replicas < 1) throw config_error("replicas must be >= 1");
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(replicas), 0);
  parallel_for(replicas, threads, [&](int rep) {
    auto r = static_cast<std::uint32_t>(rep);
    std::uint32_t hits = 0;
    for (int k = params.k_min; k <= params.k_max; ++k) {
      auto [first, last] = bucket_bounds(window.seq, k);
      if (first > last) continue;
      if (first > params.n_max) break;
      last = std::min<std::uint64_t>(last, params.n_max);
      // Majorant skip-sampling: cover probabilities p_n = min(1, 2*half(r_n))
      // are non-increasing within a bucket, so thin a Bernoulli(p_max)
      // process down to Bernoulli(p_n). One geometric skip per candidate.
      double pmax = std::min(1.0, 2.0 * projection_halfwidth(window, window.seq.at(first)));
      if (pmax <= 0) continue;
      RngStream s = root.at(r, static_cast<std::uint32_t>(k), 0).derive(2);
      std::uint64_t j = first;
      if (pmax >= 1.0) {
        for (; j <= last; ++j) {
          double pn = std::min(1.0, 2.0 * projection_halfwidth(window, window.seq.at(j)));
          if (s.uniform01() < pn) ++hits;
        }
        continue;
      }
      double log1mp = std::log1p(-pmax);
      while (j <= last) {
        double u = s.uniform01();
        // geometric gap: smallest g >= 0 with u < 1 - (1-pmax)^(g+1)
        double g = std::floor(std::log1p(-u) / log1mp);
        if (g > static_cast<double>(last - j)) break;
        j += static_cast<std::uint64_t>(g);
        double pn = std::min(1.0, 2.0 * projection_halfwidth(window, window.seq.at(j)));
        if (s.uniform01() < pn / pmax) ++hits;
        ++j;
      }
    }
    counts[static_cast<std::size_t>(rep)] = hits;
  });
  return counts;
}

}  // namespace covset
