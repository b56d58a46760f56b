#pragma once

// Bitset over the dyadic cells of [-1/2,1/2)^d. Cells are indexed per
// coordinate at depth m_i (anisotropic depths are used for kappa-adapted
// counting); the linear index is row-major.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace covset {

class OccupancyGrid {
 public:
  static constexpr int kMaxDimGrid = 4;

  OccupancyGrid(int d, std::span<const int> depths);
  static OccupancyGrid isotropic(int d, int m);

  int dim() const { return d_; }
  int depth(int i) const { return depths_[static_cast<std::size_t>(i)]; }
  bool is_isotropic() const;
  int iso_depth() const;  // requires is_isotropic()
  std::uint64_t total_cells() const { return total_; }

  std::uint64_t linear_index(std::span<const std::uint32_t> cell) const;
  void set(std::uint64_t idx);
  void set_cell(std::span<const std::uint32_t> cell) { set(linear_index(cell)); }
  bool test(std::uint64_t idx) const;
  bool test_cell(std::span<const std::uint32_t> cell) const {
    return test(linear_index(cell));
  }
  void fill();

  std::uint64_t count() const;
  bool empty() const;
  double occupied_fraction() const;

  // Parent grid: every coordinate depth reduced by one, a parent cell is
  // occupied iff some child is.
  OccupancyGrid coarsened() const;

  void and_with(const OccupancyGrid& other);
  void or_with(const OccupancyGrid& other);
  bool intersects(const OccupancyGrid& other) const;
  std::uint64_t intersection_count(const OccupancyGrid& other) const;
  bool subset_of(const OccupancyGrid& other) const;
  bool operator==(const OccupancyGrid& other) const;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void check_compatible(const OccupancyGrid& other) const;
  int d_ = 0;
  std::array<int, kMaxDimGrid> depths_{};
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace covset
