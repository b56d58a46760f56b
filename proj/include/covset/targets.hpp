#pragma once

// Analytic target sets F with exactly known Hausdorff and packing dimensions:
// digit-restricted Cantor products and affine slices. Rasterization marks
// every depth-m cell whose closure meets F (exact integer arithmetic).

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covset/geometry.hpp"
#include "covset/grid.hpp"

namespace covset {

class TargetSet {
 public:
  // Points whose base-b expansion of x_i + 1/2 uses only digits in digit_sets[i].
  static TargetSet digit_cantor(int base,
                                std::vector<std::vector<int>> digit_sets);
  // Coordinates in `fixed` (1-based) pinned to the given values, others free.
  static TargetSet affine_slice(int d, const std::map<int, double>& fixed);
  static TargetSet full_torus(int d);

  int dim() const { return d_; }
  double dim_h() const { return dim_h_; }
  double dim_p() const { return dim_p_; }
  std::pair<double, double> dims() const { return {dim_h_, dim_p_}; }

  // Dimensions in the snowflake metric kappa: sum_i s_i / H_i over the
  // per-coordinate factor dimensions s_i.
  std::pair<double, double> dims_snowflake(const SnowflakeExponents& H) const;

  // Occupancy of one coordinate factor over the 2^depth dyadic cells.
  std::vector<std::uint8_t> factor_occupancy(int coord, int depth) const;
  // Occupied-cell count of one factor without materializing the bitset.
  std::uint64_t factor_count(int coord, int depth) const;

  OccupancyGrid rasterize(int depth) const;
  OccupancyGrid rasterize(std::span<const int> depths) const;
  // Product of factor counts at per-coordinate depths (kappa-adapted counting).
  double count_cells(std::span<const int> depths) const;

  std::string describe() const;

 private:
  struct Factor {
    enum Kind { Free, Fixed, Cantor } kind = Free;
    double value = 0;         // Fixed
    int base = 0;             // Cantor
    std::vector<int> digits;  // Cantor, sorted unique
    double dimension() const;
  };
  TargetSet() = default;
  int d_ = 0;
  std::vector<Factor> factors_;
  double dim_h_ = 0, dim_p_ = 0;
};

}  // namespace covset
