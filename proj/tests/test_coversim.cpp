#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "covset/coversim.hpp"
#include "covset/errors.hpp"
#include "covset/predictor.hpp"

using namespace covset;

namespace {

SimWindow ball_window(double c, double a, int m0, int m1, int depth) {
  return SimWindow(1, m0, m1, depth, ShapeFamily{ShapeKind::Ball, std::nullopt},
                   RadiusSequence::power_law(c, a), false);
}

}  // namespace

TEST_CASE("ball occupancy cell counts") {
  // a ball with r = 0.3 occupies between ceil(0.6 * 2^m) and +2 cells
  ShapeFamily fam{ShapeKind::Ball, std::nullopt};
  RngStream s = RngStream::root(3).derive(7);
  for (int m : {6, 9, 12}) {
    for (int trial = 0; trial < 40; ++trial) {
      OccupancyGrid g = OccupancyGrid::isotropic(1, m);
      Placement p;
      p.x = s.uniform_point(1);
      p.r = 0.3;
      p.rot = Rotation::identity(1);
      rasterize_placement(g, fam, p);
      auto lo = static_cast<std::uint64_t>(std::ceil(0.6 * std::ldexp(1.0, m)));
      CHECK(g.count() >= lo);
      CHECK(g.count() <= lo + 2);
    }
  }
}

TEST_CASE("mean occupied fraction of one ball") {
  // expected fraction 2r + O(2^-m) for r = 0.1 at depth 12
  ShapeFamily fam{ShapeKind::Ball, std::nullopt};
  RngStream s = RngStream::root(4).derive(1);
  double acc = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    OccupancyGrid g = OccupancyGrid::isotropic(1, 12);
    Placement p;
    p.x = s.uniform_point(1);
    p.r = 0.1;
    p.rot = Rotation::identity(1);
    rasterize_placement(g, fam, p);
    acc += g.occupied_fraction();
  }
  CHECK(std::fabs(acc / n - 0.2) < 0.01);
}

TEST_CASE("empty generation rasterizes to an empty grid") {
  // geometric lambda = 1/2 has exactly one index per bucket; an explicit list
  // with a gap gives n_k = 0
  auto seq = RadiusSequence::explicit_list({0.4, 0.3, 0.04, 0.03});
  SimWindow w(1, 1, 3, 6, ShapeFamily{ShapeKind::Ball, std::nullopt}, seq, false);
  RngStream root = RngStream::root(0);
  CHECK(generation_rasterize(w, 3, 0, root).empty());   // no r_n in [2^-4, 2^-3)
  CHECK_FALSE(generation_rasterize(w, 1, 0, root).empty());
}

TEST_CASE("limsup proxy set algebra") {
  // hand-placed generations occupying cells {1,2} and {2,3} intersect to {2}
  ShapeFamily fam{ShapeKind::Ball, std::nullopt};
  const int depth = 3;  // cells of width 1/8 on [-1/2, 1/2)
  auto cell_center = [&](std::uint32_t i) {
    return wrap({-0.5 + (i + 0.5) / 8.0});
  };
  Placement p12{cell_center(1), 0.09, Rotation::identity(1), false};
  Placement p23{cell_center(2), 0.09, Rotation::identity(1), false};
  // radius 0.09 > 1/16 covers the neighbouring cell's closure but not two away
  std::vector<std::vector<Placement>> gens = {{p12}, {p23}};
  auto proxy = proxy_from_placements(1, depth, fam, gens);
  CHECK(proxy.count() == 2);  // cells 1..2 and 2..3 share {1,2} n {2,3} = ...
  // cells marked by p12: 0,1,2 (r=0.09 spills into neighbours); p23: 1,2,3
  CHECK(proxy.test(1));
  CHECK(proxy.test(2));
}

TEST_CASE("single-generation window is the generation itself") {
  auto w = ball_window(0.9, 0.8, 4, 4, 8);
  RngStream root = RngStream::root(99);
  auto proxy = limsup_proxy(w, 0, root);
  auto gen = generation_rasterize(w, 4, 0, root);
  CHECK(proxy == gen);
}

TEST_CASE("brute-force oracle on the depth-6 hand instance") {
  // d=1, depth 6, window [2,4], 3 explicit radii per generation,
  // hand-placed centers; oracle: a cell survives iff for every k it meets
  // some generation-k interval (direct interval arithmetic)
  std::vector<std::vector<double>> radii = {{0.24, 0.2, 0.13},
                                            {0.12, 0.1, 0.07},
                                            {0.06, 0.05, 0.04}};
  std::vector<std::vector<double>> centers = {{-0.3, 0.1, 0.42},
                                              {-0.45, -0.1, 0.33},
                                              {-0.2, 0.055, 0.48}};
  ShapeFamily fam{ShapeKind::Ball, std::nullopt};
  std::vector<std::vector<Placement>> gens;
  for (int g = 0; g < 3; ++g) {
    std::vector<Placement> gen;
    for (int i = 0; i < 3; ++i)
      gen.push_back({wrap({centers[g][i]}), radii[g][i], Rotation::identity(1), false});
    gens.push_back(gen);
  }
  auto proxy = proxy_from_placements(1, 6, fam, gens);

  // oracle
  for (std::uint32_t cell = 0; cell < 64; ++cell) {
    double lo = -0.5 + cell / 64.0, hi = lo + 1.0 / 64.0;
    bool survives = true;
    for (int g = 0; g < 3 && survives; ++g) {
      bool meets = false;
      for (int i = 0; i < 3 && !meets; ++i) {
        // closed interval [c - r, c + r] vs closed cell [lo, hi] on the circle
        double c = centers[g][i], r = radii[g][i];
        double mid = 0.5 * (lo + hi);
        meets = torus_dist1(c, mid) <= r + 1.0 / 128.0;
      }
      survives = meets;
    }
    CHECK(proxy.test(cell) == survives);
  }
}

TEST_CASE("window monotonicity: more generations never add cells") {
  RngStream root = RngStream::root(2718);
  auto w_small = ball_window(1 - 1e-9, 1.0, 6, 9, 12);
  auto w_big = ball_window(1 - 1e-9, 1.0, 6, 12, 12);
  for (std::uint32_t rep = 0; rep < 5; ++rep) {
    auto big = limsup_proxy(w_big, rep, root);
    auto small = limsup_proxy(w_small, rep, root);
    CHECK(big.subset_of(small));
  }
}

TEST_CASE("determinism across thread counts") {
  auto w = ball_window(1 - 1e-9, 0.9, 5, 10, 12);
  RngStream root = RngStream::root(31415);
  auto r1 = cover_dim(w, 8, root, 1);
  auto r8 = cover_dim(w, 8, root, 8);
  REQUIRE(r1.per_replica.size() == r8.per_replica.size());
  for (std::size_t i = 0; i < r1.per_replica.size(); ++i) {
    CHECK(r1.per_replica[i].slope == r8.per_replica[i].slope);
    CHECK(r1.per_replica[i].counts == r8.per_replica[i].counts);
  }
  CHECK(r1.proxy_fraction == r8.proxy_fraction);
}

TEST_CASE("box dimension estimates") {
  auto full = OccupancyGrid::isotropic(1, 10);
  full.fill();
  auto est = box_dim_estimate(full, 4, 10);
  CHECK(est.slope == doctest::Approx(1.0).epsilon(1e-12));

  auto cantor4 = TargetSet::digit_cantor(4, {{0, 3}});
  auto grid = cantor4.rasterize(20);
  auto c = box_dim_estimate(grid, 10, 20);
  CHECK(std::fabs(c.slope - 0.5) <= 0.02);

  auto single = OccupancyGrid::isotropic(1, 8);
  single.set(17);
  auto s = box_dim_estimate(single, 2, 8);
  CHECK(s.slope == doctest::Approx(0.0).epsilon(1e-12));

  auto empty = OccupancyGrid::isotropic(1, 8);
  CHECK_THROWS_WITH_AS(box_dim_estimate(empty, 2, 8),
                       "empty set has no dimension estimate", std::invalid_argument);
}

TEST_CASE("proxy occupied fraction for alpha = 1 windows") {
  auto w = ball_window(1 - 1e-9, 1.0, 6, 12, 14);
  RngStream root = RngStream::root(60902);
  for (std::uint32_t rep = 0; rep < 20; ++rep) {
    double frac = limsup_proxy(w, rep, root).occupied_fraction();
    CHECK(frac > 0.05);
    CHECK(frac < 0.95);
  }
}

TEST_CASE("hitting the full torus is certain") {
  auto w = ball_window(1 - 1e-9, 0.8, 5, 9, 11);
  auto res = hitting_frequency(w, TargetSet::full_torus(1), 20, RngStream::root(5), 2);
  CHECK(res.frequency == 1.0);
  CHECK(res.ci.lo <= 1.0);
  CHECK(res.ci.hi >= res.ci.lo);
  CHECK(res.empty_proxies <= res.replicas);  // tracked per replica
}

TEST_CASE("point target in the avoid regime is rarely sustained-hit") {
  // alpha = 0.7, F = point: dim 0 < 1 - 0.7
  auto w = ball_window(1 - 1e-9, 0.7, 6, 12, 14);
  auto point = TargetSet::affine_slice(1, {{1, 0.217}});
  auto res = hitting_frequency(w, point, 50, RngStream::root(8), 2);
  CHECK(res.frequency <= 0.2);
}

TEST_CASE("intersection dim requires a hitting regime") {
  auto w = ball_window(1 - 1e-9, 0.2, 6, 12, 14);
  auto cantor = TargetSet::digit_cantor(3, {{0, 2}});
  CHECK_THROWS_AS(intersection_dim(w, cantor, 5, RngStream::root(1), 1),
                  config_error);
}

TEST_CASE("intersection with the full torus estimates dim E") {
  auto w = ball_window(1 - 1e-9, 0.7, 6, 14, 16);
  auto res = intersection_dim(w, TargetSet::full_torus(1), 20, RngStream::root(12), 2);
  CHECK(res.nonempty == 20);
  CHECK(std::fabs(res.median_slope - 0.7) <= 0.15);
}

TEST_CASE("projection counting: skip sampling matches the direct loop in law") {
  SnowflakeExponents H({1.0, 1.0 / 3});
  SimWindow w(2, 1, 1, 1, ShapeFamily{ShapeKind::AxisRect, H},
              RadiusSequence::power_law(1 - 1e-9, 2.0), false);
  ProjectionCountParams params;
  params.b = 0.37;
  params.n_max = 3000;
  params.k_min = 0;
  params.k_max = 63;
  RngStream root = RngStream::root(777);
  const int reps = 4000;
  auto skip = projection_hit_counts(w, params, reps, root, 2);
  double mean_skip = 0;
  for (auto c : skip) mean_skip += c;
  mean_skip /= reps;
  double mean_direct = 0;
  for (int rep = 0; rep < reps; ++rep)
    mean_direct += projection_hit_count_direct(w, params, static_cast<std::uint32_t>(rep),
                                               root.derive(9));
  mean_direct /= reps;
  // oracle: sum of min(1, r_n^3)
  double oracle = 0;
  for (std::uint64_t n = 1; n <= params.n_max; ++n)
    oracle += std::min(1.0, std::pow(w.seq.at(n), 3.0));
  CHECK(std::fabs(mean_skip - oracle) < 0.1);
  CHECK(std::fabs(mean_direct - oracle) < 0.1);
}

TEST_CASE("window validation") {
  CHECK_THROWS_AS(ball_window(0.5, 1.0, 0, 4, 8), config_error);   // m0 = 0
  CHECK_THROWS_AS(ball_window(0.5, 1.0, 5, 4, 8), config_error);   // m0 > m1
  CHECK_THROWS_AS(ball_window(0.5, 1.0, 2, 9, 8), config_error);   // m1 > depth
  CHECK_THROWS_AS(ball_window(0.5, 1.0, 2, 4, 40), resource_limit_error);
}
