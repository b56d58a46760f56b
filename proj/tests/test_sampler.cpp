#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "covset/sampler.hpp"

using namespace covset;

TEST_CASE("philox known-answer vectors") {
  auto z = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(z[0] == 0x6627e8d5u);
  CHECK(z[1] == 0xe169c58du);
  CHECK(z[2] == 0xbc57ac4cu);
  CHECK(z[3] == 0x9b00dbd8u);
  auto f = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
  CHECK(f[0] == 0x408f276du);
  CHECK(f[1] == 0x41c83b0eu);
  CHECK(f[2] == 0xa20bc7c6u);
  CHECK(f[3] == 0x6d5451fdu);
  auto pi = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("uniform point statistics") {
  RngStream s = RngStream::root(123).at(0, 0, 0);
  const int n = 100000;
  double mean = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    auto p = s.uniform_point(2);
    for (int c = 0; c < 2; ++c) {
      mean += p[c];
      m2 += p[c] * p[c];
    }
  }
  mean /= 2 * n;
  m2 /= 2 * n;
  CHECK(std::fabs(mean) < 0.005);
  CHECK(std::fabs(m2 - 1.0 / 12) < 0.002);
}

namespace {

double ks_statistic_uniform01(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    worst = std::max(worst, std::max(std::fabs(xs[i] - lo), std::fabs(xs[i] - hi)));
  }
  return worst;
}

}  // namespace

TEST_CASE("KS test against the uniform law") {
  RngStream s = RngStream::root(9).at(1, 0, 0);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) xs.push_back(s.uniform01());
  // 1% critical value 1.6276 / sqrt(n)
  CHECK(ks_statistic_uniform01(xs) < 1.6276 / std::sqrt(10000.0));
}

TEST_CASE("haar rotations are orthogonal with balanced determinant") {
  for (int d : {2, 3}) {
    RngStream s = RngStream::root(31).at(0, 0, static_cast<std::uint64_t>(d));
    int det_plus = 0;
    double worst = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      Rotation R = s.haar_rotation(d);
      worst = std::max(worst, R.orthogonality_defect());
      double det = R.det();
      CHECK(std::fabs(std::fabs(det) - 1.0) < 1e-9);
      det_plus += det > 0;
    }
    CHECK(worst < 1e-12);
    CHECK(std::fabs(det_plus / static_cast<double>(n) - 0.5) < 0.02);
  }
  RngStream s = RngStream::root(31).at(0, 0, 9);
  CHECK_THROWS_WITH_AS(s.haar_rotation(4), "unsupported dimension",
                       std::invalid_argument);
}

TEST_CASE("haar d=2 first-column angle is uniform") {
  RngStream s = RngStream::root(77).at(0, 1, 0);
  std::vector<double> angles;
  for (int i = 0; i < 10000; ++i) {
    Rotation R = s.haar_rotation(2);
    double ang = std::atan2(R.at(1, 0), R.at(0, 0));  // [-pi, pi)
    angles.push_back((ang + M_PI) / (2 * M_PI));
  }
  CHECK(ks_statistic_uniform01(angles) < 1.6276 / std::sqrt(10000.0));
}

TEST_CASE("derive produces distinct, pure, path-keyed streams") {
  RngStream root = RngStream::root(2024);
  RngStream a = root.derive(0);
  RngStream b = root.derive(1);
  CHECK(a.next_u64() != b.next_u64());

  RngStream c1 = root.derive(5);
  RngStream c2 = root.derive(5);
  for (int i = 0; i < 16; ++i) CHECK(c1.next_u64() == c2.next_u64());

  // path-keyed: the (replica, generation) stream does not depend on what ran before
  RngStream direct = root.at(3, 5, 0);
  RngStream burn = root.at(1, 1, 0);
  for (int i = 0; i < 100; ++i) burn.uniform01();
  RngStream after = root.at(3, 5, 0);
  for (int i = 0; i < 16; ++i) CHECK(direct.next_u64() == after.next_u64());
}

TEST_CASE("sibling streams are uncorrelated") {
  RngStream root = RngStream::root(555);
  RngStream a = root.derive(10);
  RngStream b = root.derive(11);
  const int n = 10000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    double x = a.uniform01(), y = b.uniform01();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  double cov = sab / n - (sa / n) * (sb / n);
  double va = saa / n - (sa / n) * (sa / n);
  double vb = sbb / n - (sb / n) * (sb / n);
  CHECK(std::fabs(cov / std::sqrt(va * vb)) < 0.01);
}

TEST_CASE("chi-square independence of successive draws") {
  RngStream s = RngStream::root(404).at(0, 2, 0);
  const int q = 4;
  const int n = 10000;
  std::array<std::array<int, q>, q> table{};
  double prev = s.uniform01();
  for (int i = 0; i < n; ++i) {
    double cur = s.uniform01();
    int a = std::min(q - 1, static_cast<int>(prev * q));
    int b = std::min(q - 1, static_cast<int>(cur * q));
    ++table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    prev = cur;
  }
  double expect = static_cast<double>(n) / (q * q);
  double chi2 = 0;
  for (const auto& row : table)
    for (int v : row) chi2 += (v - expect) * (v - expect) / expect;
  // df = 15 at the 1% level
  CHECK(chi2 < 30.578);
}

TEST_CASE("gaussian moments") {
  RngStream s = RngStream::root(66).at(0, 3, 0);
  const int n = 100000;
  double m1 = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    double g = s.gaussian();
    m1 += g;
    m2 += g * g;
  }
  CHECK(std::fabs(m1 / n) < 0.01);
  CHECK(std::fabs(m2 / n - 1.0) < 0.02);
}
