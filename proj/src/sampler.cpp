#include "covset/sampler.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "covset/errors.hpp"

namespace covset {

namespace limits {

static std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  unsigned long long parsed = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0' || parsed == 0) return fallback;
  return static_cast<std::uint64_t>(parsed);
}

std::uint64_t max_grid_bits() {
  static const std::uint64_t cap = env_u64("COVSET_MAX_GRID_BITS", 1ull << 31);
  return cap;
}

std::uint64_t max_enumeration() {
  static const std::uint64_t cap = env_u64("COVSET_MAX_ENUM", 1000000000ull);
  return cap;
}

}  // namespace limits

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = 0xD2511F53ULL * c[0];
    std::uint64_t p1 = 0xCD9E8D57ULL * c[2];
    std::array<std::uint32_t, 4> n;
    n[0] = static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0];
    n[1] = static_cast<std::uint32_t>(p1);
    n[2] = static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1];
    n[3] = static_cast<std::uint32_t>(p0);
    c = n;
    k[0] += 0x9E3779B9u;
    k[1] += 0xBB67AE85u;
  }
  return c;
}

RngStream RngStream::root(std::uint64_t master_seed) {
  RngStream s;
  s.key_ = {static_cast<std::uint32_t>(master_seed),
            static_cast<std::uint32_t>(master_seed >> 32)};
  return s;
}

RngStream RngStream::at(std::uint32_t replica, std::uint32_t generation,
                        std::uint64_t index) const {
  if (generation >= 64) throw std::invalid_argument("generation must be < 64");
  if (index >= (1ull << 58)) throw std::invalid_argument("stream index must be < 2^58");
  RngStream s;
  s.key_ = key_;
  s.path_[0] = replica;
  s.path_[1] = (generation << 26) | static_cast<std::uint32_t>(index >> 32);
  s.path_[2] = static_cast<std::uint32_t>(index);
  return s;
}

RngStream RngStream::derive(std::uint64_t child) const {
  // Re-key through the PRF; the tag words keep derive blocks disjoint from
  // draw blocks (whose first word is a small counter).
  std::array<std::uint32_t, 4> ctr = {0xDE51BEEFu ^ path_[0],
                                      static_cast<std::uint32_t>(child),
                                      static_cast<std::uint32_t>(child >> 32) ^ path_[1],
                                      0x5EEDC0DEu ^ path_[2]};
  auto out = philox4x32_10(ctr, key_);
  RngStream s;
  s.key_ = {out[0], out[1]};
  return s;
}

void RngStream::refill_() {
  buf_ = philox4x32_10({block_, path_[0], path_[1], path_[2]}, key_);
  ++block_;
  if (block_ == 0) throw std::runtime_error("rng stream exhausted");
  pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ > 2) refill_();
  std::uint64_t hi = buf_[static_cast<std::size_t>(pos_)];
  std::uint64_t lo = buf_[static_cast<std::size_t>(pos_ + 1)];
  pos_ += 2;
  return (hi << 32) | lo;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_sym() { return uniform01() - 0.5; }

double RngStream::gaussian() {
  if (has_spare_gauss_) {
    has_spare_gauss_ = false;
    return spare_gauss_;
  }
  double u1 = uniform01(), u2 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  double mag = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * M_PI * u2;
  spare_gauss_ = mag * std::sin(ang);
  has_spare_gauss_ = true;
  return mag * std::cos(ang);
}

TorusPoint RngStream::uniform_point(int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("uniform_point: bad dimension");
  TorusPoint p;
  p.d = d;
  for (int i = 0; i < d; ++i) p.c[static_cast<std::size_t>(i)] = uniform_sym();
  return p;
}

Rotation RngStream::haar_rotation(int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("unsupported dimension");
  Rotation R;
  R.d = d;
  if (d == 2) {
    double ang = 2.0 * M_PI * uniform01();
    double cs = std::cos(ang), sn = std::sin(ang);
    R.m = {cs, -sn, sn, cs};
    if (uniform01() < 0.5) {  // reflection coin: O(2) has two components
      R.m[1] = sn;
      R.m[3] = -cs;
    }
    return R;
  }
  // d == 3: Gram-Schmidt of a Gaussian matrix with sign-corrected columns,
  // then a reflection coin.
  double g[3][3];
  for (auto& row : g)
    for (double& x : row) x = gaussian();
  double q[3][3];
  for (int col = 0; col < 3; ++col) {
    double v[3] = {g[0][col], g[1][col], g[2][col]};
    for (int prev = 0; prev < col; ++prev) {
      double dot = 0;
      for (int i = 0; i < 3; ++i) dot += v[i] * q[i][prev];
      for (int i = 0; i < 3; ++i) v[i] -= dot * q[i][prev];
    }
    // Gram-Schmidt normalization keeps the triangular factor's diagonal
    // positive, which is the sign convention that makes Q Haar on O(3).
    double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (norm < 1e-300) return haar_rotation(d);  // measure-zero retry
    for (int i = 0; i < 3; ++i) q[i][col] = v[i] / norm;
  }
  if (uniform01() < 0.5) {
    for (int i = 0; i < 3; ++i) q[i][2] = -q[i][2];
  }
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) R.m[static_cast<std::size_t>(r * 3 + c)] = q[r][c];
  return R;
}

}  // namespace covset
