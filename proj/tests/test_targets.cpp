#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "covset/targets.hpp"

using namespace covset;

TEST_CASE("closed-form dimensions") {
  auto cantor3 = TargetSet::digit_cantor(3, {{0, 2}});
  double want = std::log(2.0) / std::log(3.0);
  CHECK(cantor3.dim_h() == doctest::Approx(want).epsilon(1e-12));
  CHECK(cantor3.dim_p() == doctest::Approx(0.630929).epsilon(1e-5));

  auto cantor4 = TargetSet::digit_cantor(4, {{0, 3}});
  CHECK(cantor4.dim_h() == doctest::Approx(0.5).epsilon(1e-15));

  auto line = TargetSet::affine_slice(2, {{2, 0.37}});
  CHECK(line.dim_h() == 1.0);
  CHECK(line.dim_p() == 1.0);

  CHECK(TargetSet::full_torus(2).dim_h() == 2.0);

  // invariance under coordinate permutation
  auto ab = TargetSet::digit_cantor(4, {{0, 3}, {0, 1, 2}});
  auto ba = TargetSet::digit_cantor(4, {{0, 1, 2}, {0, 3}});
  CHECK(ab.dim_h() == doctest::Approx(ba.dim_h()).epsilon(1e-15));
}

TEST_CASE("base-4 cantor rasterizes to exactly 2^j cells at depth 2j") {
  auto cantor4 = TargetSet::digit_cantor(4, {{0, 3}});
  for (int j = 1; j <= 8; ++j) {
    CHECK(cantor4.factor_count(0, 2 * j) == (1ull << j));
    CHECK(cantor4.factor_count(0, 2 * j + 1) == (1ull << (j + 1)));
    auto occ = cantor4.factor_occupancy(0, 2 * j);
    std::uint64_t n = 0;
    for (auto v : occ) n += v;
    CHECK(n == (1ull << j));
  }
}

TEST_CASE("affine slice rasterizes to one row") {
  auto line = TargetSet::affine_slice(2, {{2, 0.37}});
  for (int m : {6, 10}) {
    auto grid = line.rasterize(m);
    CHECK(grid.count() == (1ull << m));  // 0.37 is not on a cell boundary
  }
  // boundary value: two rows
  auto edge = TargetSet::affine_slice(1, {{1, 0.25}});
  auto g = edge.rasterize(4);
  CHECK(g.count() == 2);
  // torus wrap at -1/2
  auto wrapv = TargetSet::affine_slice(1, {{1, -0.5}});
  auto gw = wrapv.rasterize(3);
  CHECK(gw.count() == 2);
  CHECK(gw.test(0));
  CHECK(gw.test(7));
}

TEST_CASE("middle-third cantor count growth") {
  auto cantor3 = TargetSet::digit_cantor(3, {{0, 2}});
  for (int m = 12; m <= 20; m += 2) {
    double n = static_cast<double>(cantor3.factor_count(0, m));
    double rate = std::log2(n) / m;
    CHECK(rate >= 0.55);
    CHECK(rate <= 0.72);
  }
}

TEST_CASE("rasterization is coarsening-consistent") {
  auto targets = {TargetSet::digit_cantor(3, {{0, 2}}),
                  TargetSet::digit_cantor(4, {{0, 3}}),
                  TargetSet::digit_cantor(2, {{1}}),
                  TargetSet::digit_cantor(5, {{0, 2, 4}})};
  for (const auto& t : targets) {
    for (int m : {6, 9}) {
      auto fine = t.rasterize(m + 1);
      auto coarse = t.rasterize(m);
      CHECK(fine.coarsened() == coarse);
    }
  }
  auto line = TargetSet::affine_slice(2, {{2, 0.37}});
  CHECK(line.rasterize(8).coarsened() == line.rasterize(7));
}

TEST_CASE("count rate approaches dim_h for dyadic bases") {
  auto families = {TargetSet::digit_cantor(4, {{0, 3}}),
                   TargetSet::digit_cantor(4, {{0, 2}}),
                   TargetSet::digit_cantor(4, {{0, 1, 3}}),
                   TargetSet::digit_cantor(2, {{0, 1}})};
  for (const auto& t : families) {
    for (int m = 12; m <= 20; m += 4) {
      double rate = std::log2(static_cast<double>(t.factor_count(0, m))) / m;
      CHECK(std::fabs(rate - t.dim_h()) <= 0.08);
    }
  }
}

TEST_CASE("snowflake dimensions") {
  SnowflakeExponents H13({1.0, 1.0 / 3});
  auto line = TargetSet::affine_slice(2, {{2, 0.37}});
  auto [lh, lp] = line.dims_snowflake(H13);
  CHECK(lh == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lp == doctest::Approx(1.0).epsilon(1e-12));

  auto full = TargetSet::full_torus(2);
  auto [fh, fp] = full.dims_snowflake(H13);
  CHECK(fh == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fp == doctest::Approx(4.0).epsilon(1e-12));

  SnowflakeExponents H12({1.0, 0.5});
  auto prod = TargetSet::digit_cantor(4, {{0, 3}, {0, 3}});
  auto [ph, pp] = prod.dims_snowflake(H12);
  CHECK(ph == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(pp == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("kappa-adapted counting cross-checks the product rule") {
  // kappa-scale j uses per-coordinate depths round(j / H_i); the count slope
  // over j estimates the kappa box dimension
  SnowflakeExponents H({1.0, 0.5});
  auto prod = TargetSet::digit_cantor(4, {{0, 3}, {0, 3}});
  double x1 = 0, x2 = 0, xy = 0, y1 = 0;
  int n = 0;
  for (int j = 8; j <= 16; ++j) {
    std::array<int, 2> depths = {j, 2 * j};
    double cells = prod.count_cells(std::span<const int>(depths.data(), 2));
    double y = std::log2(cells);
    x1 += j;
    x2 += static_cast<double>(j) * j;
    xy += j * y;
    y1 += y;
    ++n;
  }
  double slope = (n * xy - x1 * y1) / (n * x2 - x1 * x1);
  CHECK(std::fabs(slope - 1.5) <= 0.1);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(TargetSet::digit_cantor(1, {{0}}), std::invalid_argument);
  CHECK_THROWS_AS(TargetSet::digit_cantor(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(TargetSet::digit_cantor(3, {{}}), std::invalid_argument);
  CHECK_THROWS_AS(TargetSet::affine_slice(2, {{3, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TargetSet::affine_slice(2, {{1, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(TargetSet::affine_slice(2, {{1, 0.3}}).dims_snowflake(
                      SnowflakeExponents({1.0})),
                  std::invalid_argument);
}

TEST_CASE("full digit set reduces to the free coordinate") {
  auto t = TargetSet::digit_cantor(2, {{0, 1}});
  CHECK(t.dim_h() == 1.0);
  CHECK(t.factor_count(0, 10) == 1024);
}
