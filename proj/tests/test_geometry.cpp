#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "covset/geometry.hpp"
#include "covset/sampler.hpp"

using namespace covset;

TEST_CASE("wrap into [-1/2, 1/2)") {
  auto p = wrap({0.6, -0.7});
  CHECK(p[0] == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(wrap({0.5})[0] == -0.5);  // right-open convention
  CHECK(wrap({0.0, 0.0})[0] == 0.0);
  CHECK(wrap({0.0, 0.0})[1] == 0.0);
  CHECK(wrap1(-0.5) == -0.5);
  CHECK(wrap1(1.5) == -0.5);
  for (double x : {-3.7, -0.499, 0.123, 17.25}) {
    double y = wrap1(x);
    CHECK(y >= -0.5);
    CHECK(y < 0.5);
    CHECK(std::fabs(std::remainder(x - y, 1.0)) < 1e-12);
  }
}

TEST_CASE("kappa distance") {
  SnowflakeExponents H({1.0, 0.5});
  auto x = wrap({0.0, 0.0});
  auto y = wrap({0.1, 0.04});
  double expect = std::max(2.0 * 0.1, std::pow(2.0, 0.5) * std::pow(0.04, 0.5));
  CHECK(kappa_dist(x, y, H) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(kappa_dist(x, y, H) == doctest::Approx(0.2828427124746190).epsilon(1e-12));
  CHECK(kappa_dist(y, y, H) == 0.0);
  SnowflakeExponents H1({1.0});
  CHECK(kappa_dist(wrap({0.0}), wrap({0.25}), H1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("kappa is a metric on sampled triples") {
  for (auto hvals : {std::vector<double>{1.0, 0.5}, std::vector<double>{1.0, 1.0 / 3}}) {
    SnowflakeExponents H(std::span<const double>(hvals.data(), hvals.size()));
    RngStream s = RngStream::root(42).derive(1);
    for (int i = 0; i < 10000; ++i) {
      auto a = s.uniform_point(2), b = s.uniform_point(2), c = s.uniform_point(2);
      double ab = kappa_dist(a, b, H), ba = kappa_dist(b, a, H);
      CHECK(ab == ba);
      CHECK(kappa_dist(a, c, H) <= ab + kappa_dist(b, c, H) + 1e-12);
    }
  }
}

TEST_CASE("kappa ball is exactly an axis rectangle") {
  SnowflakeExponents H({1.0, 1.0 / 3});
  auto box = kappa_ball_as_rect(wrap({0.0, 0.0}), 0.25, H);
  CHECK(2 * box.half[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(2 * box.half[1] == doctest::Approx(1.0 / 64).epsilon(1e-12));

  SnowflakeExponents H1({1.0});
  auto b1 = kappa_ball_as_rect(wrap({0.0}), 0.09, H1);
  CHECK(2 * b1.half[0] == doctest::Approx(0.09).epsilon(1e-15));

  // strict interior membership
  auto y = wrap({0.25 / 2 - 1e-9, 0.0});
  CHECK(box.contains(y));

  // identity on random samples: kappa_dist(c,y,H) <= r  <=>  y in box
  RngStream s = RngStream::root(7).derive(2);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    auto c = s.uniform_point(2);
    double r = 0.05 + 0.9 * s.uniform01();
    auto bx = kappa_ball_as_rect(c, r, H);
    auto pt = s.uniform_point(2);
    bool in_ball = kappa_dist(c, pt, H) <= r;
    bool in_box = bx.contains(pt);
    CHECK(in_ball == in_box);
    checked += in_ball;
  }
  CHECK(checked > 0);
}

TEST_CASE("ball cell intersection in d = 1") {
  // ball radius 0.1 at 0, depth 3: cells [-0.125,0) and [0,0.125) plus the
  // closed neighbours that touch at +-0.1? covered cells are exactly those
  // meeting [-0.1, 0.1]: indices 3 and 4 (plus none others: cell 2 ends at
  // -0.125 < -0.1, wait cell 2 = [-0.25,-0.125], 0.1 inside cell 4=[0,0.125])
  auto shape = GeneratingShape::ball(0.1);
  auto x = wrap({0.0});
  std::set<std::uint32_t> occ;
  for (std::uint32_t i = 0; i < 8; ++i) {
    std::array<std::uint32_t, 1> cell = {i};
    if (shape_cell_intersects(shape, x, 3, cell)) occ.insert(i);
  }
  CHECK(occ == std::set<std::uint32_t>{3, 4});

  // wrap-around: ball at 0.45 covers [0.35, 0.55] mod 1
  auto x2 = wrap({0.45});
  std::set<std::uint32_t> occ2;
  for (std::uint32_t i = 0; i < 8; ++i) {
    std::array<std::uint32_t, 1> cell = {i};
    if (shape_cell_intersects(shape, x2, 3, cell)) occ2.insert(i);
  }
  // cells [0.25,0.375), [0.375,0.5), and wrapped [-0.5,-0.375)
  CHECK(occ2 == std::set<std::uint32_t>{0, 6, 7});
}

TEST_CASE("axis rect centred at origin meets all four origin cells") {
  SnowflakeExponents H({1.0, 1.0 / 3});
  auto shape = GeneratingShape::axis_rect(H, 0.25);  // sides 1/4 x 1/64
  auto x = wrap({0.0, 0.0});
  int count = 0;
  for (std::uint32_t i = 0; i < 2; ++i)
    for (std::uint32_t j = 0; j < 2; ++j) {
      std::array<std::uint32_t, 2> cell = {i, j};
      if (shape_cell_intersects(shape, x, 1, cell)) ++count;
    }
  CHECK(count == 4);
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(GeneratingShape::ball(0.0), std::invalid_argument);
  CHECK_THROWS_AS(GeneratingShape::ball(1.0), std::invalid_argument);
  SnowflakeExponents H({1.0, 1.0});
  // 0.9 x 0.9 square does not fit inside U(0, 1/2)
  CHECK_THROWS_AS(GeneratingShape::axis_rect(H, 0.9), std::invalid_argument);
  CHECK_NOTHROW(GeneratingShape::axis_rect(H, 0.3));
  Rotation bad = Rotation::identity(2);
  bad.m[0] = 1.0 + 1e-6;
  CHECK_THROWS_AS(GeneratingShape::rotated_rect(H, 0.3, bad), std::invalid_argument);
  CHECK_THROWS_AS(SnowflakeExponents({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(SnowflakeExponents({1.0, 0.5, 0.7}), std::invalid_argument);
}

TEST_CASE("intersection predicate vs oversampled membership") {
  // no false negatives against a 32x-oversampled point test; positives only
  // near the boundary
  RngStream s = RngStream::root(11).derive(3);
  SnowflakeExponents H({1.0, 0.5});
  int disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int m = 4 + static_cast<int>(s.uniform01() * 4);  // depth 4..7
    double r = 0.02 + 0.2 * s.uniform01();
    int kind = trial % 3;
    GeneratingShape shape = kind == 0   ? GeneratingShape::ball(r)
                            : kind == 1 ? GeneratingShape::axis_rect(H, r)
                                        : GeneratingShape::rotated_rect(
                                              H, r, s.haar_rotation(2));
    auto x = s.uniform_point(2);
    std::array<std::uint32_t, 2> cell = {
        static_cast<std::uint32_t>(s.uniform01() * (1u << m)),
        static_cast<std::uint32_t>(s.uniform01() * (1u << m))};
    bool pred = shape_cell_intersects(shape, x, m, cell);

    // oversampled membership: sample a 32x32 lattice of the cell
    double w = std::ldexp(1.0, -m);
    bool any_in = false;
    for (int a = 0; a <= 32 && !any_in; ++a) {
      for (int b = 0; b <= 32 && !any_in; ++b) {
        double px = -0.5 + (cell[0] + a / 32.0) * w;
        double py = -0.5 + (cell[1] + b / 32.0) * w;
        double dx = wrap1(px - x[0]), dy = wrap1(py - x[1]);
        bool inside = false;
        if (shape.kind() == ShapeKind::Ball) {
          inside = dx * dx + dy * dy <= r * r;
        } else {
          auto hs = shape.half_sides();
          double ux = dx, uy = dy;
          if (shape.kind() == ShapeKind::RotatedRect) {
            const auto& R = shape.rotation();
            ux = R.at(0, 0) * dx + R.at(1, 0) * dy;  // R^T (p - x)
            uy = R.at(0, 1) * dx + R.at(1, 1) * dy;
          }
          inside = std::fabs(ux) <= hs[0] && std::fabs(uy) <= hs[1];
        }
        if (inside) any_in = true;
      }
    }
    if (any_in) {
      CHECK(pred);  // no false negatives
    } else if (pred) {
      ++disagreements;  // allowed: within one sample spacing of the boundary
    }
  }
  CHECK(disagreements < 250);
}

TEST_CASE("rotated rectangle raster mass matches area") {
  // fraction of depth-10 cells occupied should be area + O(perimeter * 2^-m)
  RngStream s = RngStream::root(5).derive(4);
  SnowflakeExponents H({1.0, 0.5});
  const int m = 10;
  double r = 0.18;
  auto shape = GeneratingShape::rotated_rect(H, r, s.haar_rotation(2));
  auto hs = shape.half_sides();
  double area = 4 * hs[0] * hs[1];
  double perim = 4 * (hs[0] + hs[1]);
  auto x = s.uniform_point(2);
  auto bb = shape.bounding_half_widths(2);
  std::int64_t cells = 0;
  const double scale = 1 << m;
  auto lo0 = static_cast<std::int64_t>(std::floor((x[0] - bb[0] + 0.5) * scale));
  auto hi0 = static_cast<std::int64_t>(std::floor((x[0] + bb[0] + 0.5) * scale));
  auto lo1 = static_cast<std::int64_t>(std::floor((x[1] - bb[1] + 0.5) * scale));
  auto hi1 = static_cast<std::int64_t>(std::floor((x[1] + bb[1] + 0.5) * scale));
  for (std::int64_t i = lo0; i <= hi0; ++i)
    for (std::int64_t j = lo1; j <= hi1; ++j) {
      std::array<std::uint32_t, 2> cell = {static_cast<std::uint32_t>(i & 1023),
                                           static_cast<std::uint32_t>(j & 1023)};
      if (shape_cell_intersects(shape, x, m, cell)) ++cells;
    }
  double measured = static_cast<double>(cells) / std::pow(2.0, 2 * m);
  double budget = area + 4 * perim * std::ldexp(1.0, -m);
  CHECK(measured >= area / 2);
  CHECK(measured <= 2 * budget);
}

TEST_CASE("conservative predicate flag for rotated d >= 3") {
  SnowflakeExponents H({1.0, 1.0, 0.5});
  Rotation id3 = Rotation::identity(3);
  auto shape = GeneratingShape::rotated_rect(H, 0.2, id3);
  CHECK_FALSE(shape.exact_predicate(3));
  CHECK(GeneratingShape::ball(0.2).exact_predicate(3));
  SnowflakeExponents H2({1.0, 0.5});
  CHECK(GeneratingShape::rotated_rect(H2, 0.2, Rotation::identity(2)).exact_predicate(2));
}
