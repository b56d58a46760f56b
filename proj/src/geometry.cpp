#include "covset/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace covset {

double wrap1(double x) {
  double y = x - std::floor(x + 0.5);
  if (y < -0.5) y += 1.0;
  if (y >= 0.5) y -= 1.0;
  return y;
}

double torus_dist1(double a, double b) { return std::fabs(wrap1(a - b)); }

TorusPoint wrap(std::span<const double> v) {
  if (v.empty() || v.size() > kMaxDim)
    throw std::invalid_argument("wrap: dimension must be in [1,4]");
  TorusPoint p;
  p.d = static_cast<int>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p.c[i] = wrap1(v[i]);
  return p;
}

TorusPoint wrap(std::initializer_list<double> v) {
  return wrap(std::span<const double>(v.begin(), v.size()));
}

SnowflakeExponents::SnowflakeExponents(std::span<const double> h) {
  if (h.empty() || h.size() > kMaxDim)
    throw std::invalid_argument("snowflake exponents: dimension must be in [1,4]");
  if (h[0] != 1.0)
    throw std::invalid_argument("snowflake exponents: H_1 must equal 1");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) throw std::invalid_argument("snowflake exponents: H_i must be positive");
    if (i > 0 && h[i] > h[i - 1])
      throw std::invalid_argument("snowflake exponents: H must be non-increasing");
    h_[i] = h[i];
  }
  d_ = static_cast<int>(h.size());
}

SnowflakeExponents::SnowflakeExponents(std::initializer_list<double> h)
    : SnowflakeExponents(std::span<const double>(h.begin(), h.size())) {}

SnowflakeExponents SnowflakeExponents::isotropic(int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("bad dimension");
  std::array<double, kMaxDim> h{};
  for (int i = 0; i < d; ++i) h[static_cast<std::size_t>(i)] = 1.0;
  return SnowflakeExponents(std::span<const double>(h.data(), static_cast<std::size_t>(d)));
}

double SnowflakeExponents::inv_sum() const {
  double s = 0;
  for (int i = 0; i < d_; ++i) s += 1.0 / h_[static_cast<std::size_t>(i)];
  return s;
}

double kappa_dist(const TorusPoint& x, const TorusPoint& y,
                  const SnowflakeExponents& H) {
  if (x.d != y.d || x.d != H.dim())
    throw std::invalid_argument("kappa_dist: dimension mismatch");
  double m = 0;
  for (int i = 0; i < x.d; ++i) {
    double di = torus_dist1(x[i], y[i]);
    m = std::max(m, std::exp2(H.h(i)) * std::pow(di, H.h(i)));
  }
  return m;
}

bool Box::contains(const TorusPoint& y) const {
  if (y.d != d) throw std::invalid_argument("box: dimension mismatch");
  for (int i = 0; i < d; ++i) {
    if (torus_dist1(center[i], y[i]) > half[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

Box kappa_ball_as_rect(const TorusPoint& center, double r,
                       const SnowflakeExponents& H) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("kappa ball: r must lie in (0,1)");
  if (center.d != H.dim()) throw std::invalid_argument("kappa ball: dimension mismatch");
  Box b;
  b.center = center;
  b.d = center.d;
  for (int i = 0; i < b.d; ++i)
    b.half[static_cast<std::size_t>(i)] = 0.5 * std::pow(r, 1.0 / H.h(i));
  return b;
}

Rotation Rotation::identity(int d) {
  Rotation r;
  r.d = d;
  for (int i = 0; i < d; ++i) r.m[static_cast<std::size_t>(i * d + i)] = 1.0;
  return r;
}

std::array<double, kMaxDim> Rotation::apply(std::span<const double> v) const {
  std::array<double, kMaxDim> out{};
  for (int r = 0; r < d; ++r) {
    double acc = 0;
    for (int c = 0; c < d; ++c) acc += at(r, c) * v[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

double Rotation::orthogonality_defect() const {
  double worst = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double dot = 0;
      for (int k = 0; k < d; ++k) dot += at(k, i) * at(k, j);
      worst = std::max(worst, std::fabs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double Rotation::det() const {
  if (d == 1) return at(0, 0);
  if (d == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  if (d == 3) {
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }
  throw std::invalid_argument("det: unsupported dimension");
}

GeneratingShape GeneratingShape::ball(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("shape: r must lie in (0,1)");
  return GeneratingShape(ShapeKind::Ball, r, SnowflakeExponents::isotropic(1),
                         Rotation::identity(1));
}

static void check_rect_fits(const SnowflakeExponents& H, double r) {
  // The placed rectangle must fit inside the open ball U(0, 1/2) so that the
  // covering-map restriction is injective: sum (r^{1/H_i})^2 < 1.
  double s = 0;
  for (int i = 0; i < H.dim(); ++i) s += std::pow(r, 2.0 / H.h(i));
  if (!(s < 1.0))
    throw std::invalid_argument("shape: rectangle does not fit inside U(0, 1/2)");
}

GeneratingShape GeneratingShape::axis_rect(const SnowflakeExponents& H, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("shape: r must lie in (0,1)");
  check_rect_fits(H, r);
  return GeneratingShape(ShapeKind::AxisRect, r, H, Rotation::identity(H.dim()));
}

GeneratingShape GeneratingShape::rotated_rect(const SnowflakeExponents& H, double r,
                                              const Rotation& rot) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("shape: r must lie in (0,1)");
  if (rot.d != H.dim()) throw std::invalid_argument("shape: rotation dimension mismatch");
  check_rect_fits(H, r);
  if (rot.orthogonality_defect() > 1e-12)
    throw std::invalid_argument("shape: rotation is not orthogonal to 1e-12");
  return GeneratingShape(ShapeKind::RotatedRect, r, H, rot);
}

std::array<double, kMaxDim> GeneratingShape::half_sides() const {
  std::array<double, kMaxDim> h{};
  for (int i = 0; i < H_.dim(); ++i)
    h[static_cast<std::size_t>(i)] = 0.5 * std::pow(r_, 1.0 / H_.h(i));
  return h;
}

std::array<double, kMaxDim> GeneratingShape::bounding_half_widths(int d) const {
  std::array<double, kMaxDim> out{};
  switch (kind_) {
    case ShapeKind::Ball:
      for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] = r_;
      break;
    case ShapeKind::AxisRect:
      return half_sides();
    case ShapeKind::RotatedRect: {
      auto h = half_sides();
      for (int i = 0; i < d; ++i) {
        double acc = 0;
        for (int j = 0; j < d; ++j)
          acc += std::fabs(rot_.at(i, j)) * h[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
      }
      break;
    }
  }
  return out;
}

bool GeneratingShape::exact_predicate(int d) const {
  return !(kind_ == ShapeKind::RotatedRect && d >= 3);
}

namespace {

// Distance from coordinate `c` to the closed interval [lo, hi] on the circle.
double circle_point_interval_dist(double c, double lo, double hi) {
  double mid = 0.5 * (lo + hi);
  double halfw = 0.5 * (hi - lo);
  double u = std::fabs(wrap1(c - mid));
  return std::max(0.0, u - halfw);
}

// Closed arcs of lengths la, lb centred at a, b intersect?
bool circle_intervals_overlap(double a, double la, double b, double lb) {
  if (la + lb >= 1.0) return true;
  return torus_dist1(a, b) <= 0.5 * (la + lb);
}

// Separating-axis test for two convex polygons given by corner lists (2-d).
bool sat_overlap_2d(const std::array<std::array<double, 2>, 4>& p,
                    const std::array<std::array<double, 2>, 4>& q,
                    const std::array<std::array<double, 2>, 4>& axes, int n_axes) {
  for (int ax = 0; ax < n_axes; ++ax) {
    double ux = axes[static_cast<std::size_t>(ax)][0];
    double uy = axes[static_cast<std::size_t>(ax)][1];
    double pmin = 1e300, pmax = -1e300, qmin = 1e300, qmax = -1e300;
    for (const auto& v : p) {
      double t = v[0] * ux + v[1] * uy;
      pmin = std::min(pmin, t);
      pmax = std::max(pmax, t);
    }
    for (const auto& v : q) {
      double t = v[0] * ux + v[1] * uy;
      qmin = std::min(qmin, t);
      qmax = std::max(qmax, t);
    }
    if (pmax < qmin || qmax < pmin) return false;
  }
  return true;
}

}  // namespace

bool shape_cell_intersects(const GeneratingShape& shape, const TorusPoint& x,
                           int depth, std::span<const std::uint32_t> cell) {
  int d = x.d;
  if (depth < 0) throw std::invalid_argument("cell depth must be >= 0");
  if (static_cast<int>(cell.size()) != d)
    throw std::invalid_argument("cell index dimension mismatch");
  const double w = std::ldexp(1.0, -depth);
  std::array<double, kMaxDim> lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[static_cast<std::size_t>(i)] = -0.5 + static_cast<double>(cell[static_cast<std::size_t>(i)]) * w;
    hi[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + w;
  }

  switch (shape.kind()) {
    case ShapeKind::Ball: {
      double acc = 0;
      for (int i = 0; i < d; ++i) {
        double di = circle_point_interval_dist(x[i], lo[static_cast<std::size_t>(i)],
                                               hi[static_cast<std::size_t>(i)]);
        acc += di * di;
      }
      return acc <= shape.radius() * shape.radius();
    }
    case ShapeKind::AxisRect: {
      auto h = shape.half_sides();
      for (int i = 0; i < d; ++i) {
        double mid = 0.5 * (lo[static_cast<std::size_t>(i)] + hi[static_cast<std::size_t>(i)]);
        if (!circle_intervals_overlap(x[i], 2 * h[static_cast<std::size_t>(i)], mid, w))
          return false;
      }
      return true;
    }
    case ShapeKind::RotatedRect: {
      if (!shape.exact_predicate(d)) {
        // conservative bounding-ball over-approximation for d >= 3
        auto h = shape.half_sides();
        double rad2 = 0;
        for (int i = 0; i < d; ++i)
          rad2 += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
        double acc = 0;
        for (int i = 0; i < d; ++i) {
          double di = circle_point_interval_dist(x[i], lo[static_cast<std::size_t>(i)],
                                                 hi[static_cast<std::size_t>(i)]);
          acc += di * di;
        }
        return acc <= rad2;
      }
      // exact separating-axis test in d = 2, over the integer shifts that can
      // reach the cell
      auto h = shape.half_sides();
      const Rotation& R = shape.rotation();
      std::array<std::array<double, 2>, 4> cellq = {{{lo[0], lo[1]},
                                                     {hi[0], lo[1]},
                                                     {hi[0], hi[1]},
                                                     {lo[0], hi[1]}}};
      std::array<std::array<double, 2>, 4> axes = {{{1, 0},
                                                    {0, 1},
                                                    {R.at(0, 0), R.at(1, 0)},
                                                    {R.at(0, 1), R.at(1, 1)}}};
      for (int sx = -1; sx <= 1; ++sx) {
        for (int sy = -1; sy <= 1; ++sy) {
          double cx = x[0] + sx, cy = x[1] + sy;
          std::array<std::array<double, 2>, 4> rect;
          int idx = 0;
          for (int ex = -1; ex <= 1; ex += 2) {
            for (int ey = -1; ey <= 1; ey += 2) {
              double vx = ex * h[0], vy = ey * h[1];
              rect[static_cast<std::size_t>(idx)][0] =
                  cx + R.at(0, 0) * vx + R.at(0, 1) * vy;
              rect[static_cast<std::size_t>(idx)][1] =
                  cy + R.at(1, 0) * vx + R.at(1, 1) * vy;
              ++idx;
            }
          }
          if (sat_overlap_2d(rect, cellq, axes, 4)) return true;
        }
      }
      return false;
    }
  }
  return false;
}

}  // namespace covset
