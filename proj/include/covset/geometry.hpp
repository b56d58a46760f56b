#pragma once

// Torus arithmetic on [-1/2, 1/2)^d, generating shapes (balls, axis rectangles
// with snowflake side exponents, rotated rectangles), the snowflake metric
// kappa, and exact shape/cell intersection predicates.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace covset {

inline constexpr int kMaxDim = 4;

// Scalar wrap into [-1/2, 1/2).
double wrap1(double x);
// Distance between two circle coordinates (max 1/2).
double torus_dist1(double a, double b);

struct TorusPoint {
  std::array<double, kMaxDim> c{};
  int d = 0;
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

TorusPoint wrap(std::span<const double> v);
TorusPoint wrap(std::initializer_list<double> v);

// Side exponents 0 < H_d <= ... <= H_2 <= H_1 = 1.
class SnowflakeExponents {
 public:
  explicit SnowflakeExponents(std::span<const double> h);
  SnowflakeExponents(std::initializer_list<double> h);
  static SnowflakeExponents isotropic(int d);

  int dim() const { return d_; }
  double h(int i) const { return h_[static_cast<std::size_t>(i)]; }  // 0-based
  double inv_sum() const;  // sum_i 1/H_i
  bool operator==(const SnowflakeExponents&) const = default;

 private:
  std::array<double, kMaxDim> h_{};
  int d_ = 0;
};

// kappa(x,y) = max_i 2^{H_i} |x_i - y_i|^{H_i} with per-coordinate torus distance.
double kappa_dist(const TorusPoint& x, const TorusPoint& y,
                  const SnowflakeExponents& H);

struct Box {
  TorusPoint center;
  std::array<double, kMaxDim> half{};  // half side lengths
  int d = 0;
  bool contains(const TorusPoint& y) const;  // closed, with wrap
};

// The closed kappa-ball of radius r is exactly this axis box (sides r^{1/H_i}).
Box kappa_ball_as_rect(const TorusPoint& center, double r,
                       const SnowflakeExponents& H);

// Row-major d x d orthogonal matrix.
struct Rotation {
  std::array<double, kMaxDim * kMaxDim> m{};
  int d = 0;
  static Rotation identity(int d);
  double at(int r, int c) const { return m[static_cast<std::size_t>(r * d + c)]; }
  std::array<double, kMaxDim> apply(std::span<const double> v) const;
  double orthogonality_defect() const;  // max |R^T R - I|
  double det() const;                   // d <= 3
};

enum class ShapeKind { Ball, AxisRect, RotatedRect };

class GeneratingShape {
 public:
  static GeneratingShape ball(double r);
  static GeneratingShape axis_rect(const SnowflakeExponents& H, double r);
  static GeneratingShape rotated_rect(const SnowflakeExponents& H, double r,
                                      const Rotation& rot);

  ShapeKind kind() const { return kind_; }
  double radius() const { return r_; }
  const SnowflakeExponents& exponents() const { return H_; }
  const Rotation& rotation() const { return rot_; }
  std::array<double, kMaxDim> half_sides() const;  // rect kinds
  // Axis-aligned bounding half-widths of the placed shape.
  std::array<double, kMaxDim> bounding_half_widths(int d) const;
  // False only for rotated rectangles in d >= 3, where a conservative
  // bounding-ball test replaces the exact predicate.
  bool exact_predicate(int d) const;

 private:
  GeneratingShape(ShapeKind k, double r, SnowflakeExponents H, Rotation rot)
      : kind_(k), r_(r), H_(H), rot_(rot) {}
  ShapeKind kind_;
  double r_;
  SnowflakeExponents H_;
  Rotation rot_;
};

// TRUE iff the closed shape placed at x intersects the closed dyadic cell
// (per-coordinate index `cell`, depth m), with torus wrap-around.
bool shape_cell_intersects(const GeneratingShape& shape, const TorusPoint& x,
                           int depth, std::span<const std::uint32_t> cell);

}  // namespace covset
