#include "covset/grid.hpp"

#include <bit>
#include <stdexcept>

#include "covset/errors.hpp"

namespace covset {

OccupancyGrid::OccupancyGrid(int d, std::span<const int> depths) {
  if (d < 1 || d > kMaxDimGrid) throw std::invalid_argument("grid: dimension must be in [1,4]");
  if (static_cast<int>(depths.size()) != d)
    throw std::invalid_argument("grid: depths size mismatch");
  int total_bits = 0;
  for (int i = 0; i < d; ++i) {
    if (depths[static_cast<std::size_t>(i)] < 0 || depths[static_cast<std::size_t>(i)] > 62)
      throw std::invalid_argument("grid: depth out of range");
    total_bits += depths[static_cast<std::size_t>(i)];
    depths_[static_cast<std::size_t>(i)] = depths[static_cast<std::size_t>(i)];
  }
  if (total_bits > 62 ||
      (1ull << total_bits) > limits::max_grid_bits()) {
    throw resource_limit_error(
        "grid exceeds the memory cap of 2^" +
        std::to_string(63 - std::countl_zero(limits::max_grid_bits())) +
        " bits; reduce depth (d=1 allows depth <= 31, d=2 depth <= 15 at the "
        "default cap) or raise COVSET_MAX_GRID_BITS");
  }
  d_ = d;
  total_ = 1ull << total_bits;
  words_.assign((total_ + 63) / 64, 0);
}

OccupancyGrid OccupancyGrid::isotropic(int d, int m) {
  std::array<int, kMaxDimGrid> depths{};
  for (int i = 0; i < d; ++i) depths[static_cast<std::size_t>(i)] = m;
  return OccupancyGrid(d, std::span<const int>(depths.data(), static_cast<std::size_t>(d)));
}

bool OccupancyGrid::is_isotropic() const {
  for (int i = 1; i < d_; ++i)
    if (depths_[static_cast<std::size_t>(i)] != depths_[0]) return false;
  return true;
}

int OccupancyGrid::iso_depth() const {
  if (!is_isotropic()) throw std::logic_error("grid is anisotropic");
  return depths_[0];
}

std::uint64_t OccupancyGrid::linear_index(std::span<const std::uint32_t> cell) const {
  std::uint64_t idx = 0;
  for (int i = 0; i < d_; ++i) {
    std::uint64_t ci = cell[static_cast<std::size_t>(i)];
    idx = (idx << depths_[static_cast<std::size_t>(i)]) | ci;
  }
  return idx;
}

void OccupancyGrid::set(std::uint64_t idx) {
  words_[idx >> 6] |= 1ull << (idx & 63);
}

bool OccupancyGrid::test(std::uint64_t idx) const {
  return (words_[idx >> 6] >> (idx & 63)) & 1ull;
}

void OccupancyGrid::fill() {
  for (auto& w : words_) w = ~0ull;
  std::uint64_t tail = total_ & 63;
  if (tail) words_.back() = (1ull << tail) - 1;
}

std::uint64_t OccupancyGrid::count() const {
  std::uint64_t c = 0;
  for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

bool OccupancyGrid::empty() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

double OccupancyGrid::occupied_fraction() const {
  return static_cast<double>(count()) / static_cast<double>(total_);
}

OccupancyGrid OccupancyGrid::coarsened() const {
  std::array<int, kMaxDimGrid> nd{};
  for (int i = 0; i < d_; ++i) {
    if (depths_[static_cast<std::size_t>(i)] < 1)
      throw std::logic_error("cannot coarsen a depth-0 grid");
    nd[static_cast<std::size_t>(i)] = depths_[static_cast<std::size_t>(i)] - 1;
  }
  OccupancyGrid out(d_, std::span<const int>(nd.data(), static_cast<std::size_t>(d_)));
  if (d_ == 1) {
    // fast path: OR adjacent bit pairs
    for (std::uint64_t idx = 0; idx < words_.size(); ++idx) {
      std::uint64_t w = words_[idx];
      if (!w) continue;
      w |= w >> 1;
      w &= 0x5555555555555555ull;
      // compress even bits of w into 32 bits
      std::uint64_t packed = 0;
      std::uint64_t v = w;
      while (v) {
        int b = std::countr_zero(v);
        packed |= 1ull << (b >> 1);
        v &= v - 1;
      }
      std::uint64_t base = idx << 5;  // 64 children -> 32 parents
      out.words_[base >> 6] |= packed << (base & 63);
    }
    return out;
  }
  for (std::uint64_t idx = 0; idx < total_; idx += 64) {
    std::uint64_t bits = words_[idx >> 6];
    while (bits) {
      int b = std::countr_zero(bits);
      bits &= bits - 1;
      std::uint64_t cell = idx + static_cast<std::uint64_t>(b);
      // decompose the row-major index, halve each coordinate
      std::array<std::uint32_t, kMaxDimGrid> coords{};
      std::uint64_t rem = cell;
      for (int i = d_ - 1; i >= 0; --i) {
        int md = depths_[static_cast<std::size_t>(i)];
        coords[static_cast<std::size_t>(i)] =
            static_cast<std::uint32_t>(rem & ((1ull << md) - 1)) >> 1;
        rem >>= md;
      }
      out.set_cell(std::span<const std::uint32_t>(coords.data(), static_cast<std::size_t>(d_)));
    }
  }
  return out;
}

void OccupancyGrid::check_compatible(const OccupancyGrid& other) const {
  if (d_ != other.d_ || depths_ != other.depths_)
    throw std::invalid_argument("grid depth mismatch");
}

void OccupancyGrid::and_with(const OccupancyGrid& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
}

void OccupancyGrid::or_with(const OccupancyGrid& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
}

bool OccupancyGrid::intersects(const OccupancyGrid& other) const {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & other.words_[i]) return true;
  return false;
}

std::uint64_t OccupancyGrid::intersection_count(const OccupancyGrid& other) const {
  check_compatible(other);
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < words_.size(); ++i)
    c += static_cast<std::uint64_t>(std::popcount(words_[i] & other.words_[i]));
  return c;
}

bool OccupancyGrid::subset_of(const OccupancyGrid& other) const {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~other.words_[i]) return false;
  return true;
}

bool OccupancyGrid::operator==(const OccupancyGrid& other) const {
  return d_ == other.d_ && depths_ == other.depths_ && words_ == other.words_;
}

}  // namespace covset
