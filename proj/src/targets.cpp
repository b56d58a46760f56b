#include "covset/targets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace covset {

namespace {

using u128 = unsigned __int128;

// Does the closed dyadic cell [p/2^m, (p+1)/2^m] meet the set of points of
// [0,1] whose base-b expansion uses only the given digits? Exact integer
// arithmetic; cylinders are [A/b^L, (A+1)/b^L].
struct CantorMeets {
  int b;
  const std::vector<int>& digits;
  int m;
  std::uint64_t p;

  bool run() const { return rec(0, 1); }

 private:
  // cylinder [A, A+1] / b^L, with bL = b^L
  bool rec(u128 A, u128 bL) const {
    const u128 two_m = u128(1) << m;
    // disjoint?  A/b^L > (p+1)/2^m  or  (A+1)/b^L < p/2^m
    if (A * two_m > u128(p + 1) * bL) return false;
    if ((A + 1) * two_m < u128(p) * bL) return false;
    const bool left_in = A * two_m >= u128(p) * bL;        // cyl lo >= cell lo
    const bool right_in = (A + 1) * two_m <= u128(p + 1) * bL;  // cyl hi <= cell hi
    if (left_in && right_in) return true;  // cylinder inside the cell
    const int dmin = digits.front(), dmax = digits.back();
    if (left_in) {
      // cylinder straddles the right edge only: its lowest set point is
      // (A + dmin/(b-1)) / b^L
      return (A * u128(b - 1) + u128(dmin)) * two_m <=
             u128(p + 1) * u128(b - 1) * bL;
    }
    if (right_in) {
      // straddles the left edge only: highest set point is (A + dmax/(b-1)) / b^L
      return (A * u128(b - 1) + u128(dmax)) * two_m >=
             u128(p) * u128(b - 1) * bL;
    }
    // cylinder contains the whole cell: descend (at most ~m log_b 2 levels)
    for (int dgt : digits) {
      if (rec(A * u128(b) + u128(dgt), bL * u128(b))) return true;
    }
    return false;
  }
};

}  // namespace

double TargetSet::Factor::dimension() const {
  switch (kind) {
    case Free:
      return 1.0;
    case Fixed:
      return 0.0;
    case Cantor:
      return std::log(static_cast<double>(digits.size())) /
             std::log(static_cast<double>(base));
  }
  return 0;
}

TargetSet TargetSet::digit_cantor(int base, std::vector<std::vector<int>> digit_sets) {
  if (base < 2) throw std::invalid_argument("digit_cantor: base must be >= 2");
  if (digit_sets.empty() || digit_sets.size() > kMaxDim)
    throw std::invalid_argument("digit_cantor: dimension must be in [1,4]");
  TargetSet t;
  t.d_ = static_cast<int>(digit_sets.size());
  for (auto& ds : digit_sets) {
    if (ds.empty()) throw std::invalid_argument("digit_cantor: digit set is empty");
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    if (ds.front() < 0 || ds.back() >= base)
      throw std::invalid_argument("digit_cantor: digit out of range");
    Factor f;
    if (static_cast<int>(ds.size()) == base) {
      f.kind = Factor::Free;  // full digit set is the whole coordinate
    } else {
      f.kind = Factor::Cantor;
      f.base = base;
      f.digits = ds;
    }
    t.factors_.push_back(std::move(f));
  }
  double dim = 0;
  for (const auto& f : t.factors_) dim += f.dimension();
  t.dim_h_ = t.dim_p_ = dim;
  return t;
}

TargetSet TargetSet::affine_slice(int d, const std::map<int, double>& fixed) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("affine_slice: dimension must be in [1,4]");
  TargetSet t;
  t.d_ = d;
  t.factors_.resize(static_cast<std::size_t>(d));
  for (const auto& [coord, value] : fixed) {
    if (coord < 1 || coord > d)
      throw std::invalid_argument("affine_slice: fixed coordinate out of range");
    if (!(value >= -0.5 && value < 0.5))
      throw std::invalid_argument("affine_slice: fixed value must lie in [-1/2, 1/2)");
    auto& f = t.factors_[static_cast<std::size_t>(coord - 1)];
    f.kind = Factor::Fixed;
    f.value = value;
  }
  t.dim_h_ = t.dim_p_ = static_cast<double>(d - static_cast<int>(fixed.size()));
  return t;
}

TargetSet TargetSet::full_torus(int d) { return affine_slice(d, {}); }

std::pair<double, double> TargetSet::dims_snowflake(const SnowflakeExponents& H) const {
  if (H.dim() != d_) throw std::invalid_argument("dims_snowflake: dimension mismatch");
  double s = 0;
  for (int i = 0; i < d_; ++i)
    s += factors_[static_cast<std::size_t>(i)].dimension() / H.h(i);
  return {s, s};
}

std::vector<std::uint8_t> TargetSet::factor_occupancy(int coord, int depth) const {
  if (coord < 0 || coord >= d_) throw std::invalid_argument("factor coordinate out of range");
  if (depth < 0 || depth > 40) throw std::invalid_argument("factor depth out of range");
  const Factor& f = factors_[static_cast<std::size_t>(coord)];
  const std::uint64_t n = 1ull << depth;
  std::vector<std::uint8_t> occ(n, 0);
  switch (f.kind) {
    case Factor::Free:
      std::fill(occ.begin(), occ.end(), 1);
      break;
    case Factor::Fixed: {
      double u = f.value + 0.5;  // in [0,1)
      double t = std::ldexp(u, depth);
      auto p = static_cast<std::uint64_t>(std::min(std::floor(t),
                                                   static_cast<double>(n - 1)));
      occ[p] = 1;
      if (t == std::floor(t)) {
        // the value sits on a cell boundary; the left neighbour's closure
        // also contains it (with torus wrap at zero)
        occ[(p + n - 1) % n] = 1;
      }
      break;
    }
    case Factor::Cantor: {
      if ((f.base & (f.base - 1)) == 0) {
        // dyadic base: exact digit-aligned rasterization (a depth-m cell is
        // occupied iff its bit prefix extends to an allowed digit string)
        struct Aligned {
          const Factor& f;
          int depth;
          int q;  // bits per digit
          std::vector<std::uint8_t>& occ;
          bool partial_ok(int bits, std::uint32_t partial) const {
            if (bits == 0) return true;
            int rest = q - bits;
            for (int d : f.digits)
              if (static_cast<std::uint32_t>(d >> rest) == partial) return true;
            return false;
          }
          void walk(std::uint64_t idx, int level, int bits, std::uint32_t partial) const {
            if (level == depth) {
              occ[idx] = 1;
              return;
            }
            for (std::uint32_t bit = 0; bit < 2; ++bit) {
              std::uint32_t p2 = (partial << 1) | bit;
              int b2 = bits + 1;
              if (b2 == q) {
                if (std::binary_search(f.digits.begin(), f.digits.end(),
                                       static_cast<int>(p2)))
                  walk(2 * idx + bit, level + 1, 0, 0);
              } else if (partial_ok(b2, p2)) {
                walk(2 * idx + bit, level + 1, b2, p2);
              }
            }
          }
        };
        int q = 0;
        while ((1 << q) < f.base) ++q;
        Aligned{f, depth, q, occ}.walk(0, 0, 0, 0);
        break;
      }
      // non-dyadic base: conservative raster, every cell whose closure meets F
      struct Walker {
        const Factor& f;
        int depth;
        std::vector<std::uint8_t>& occ;
        void walk(std::uint64_t idx, int level) const {
          CantorMeets q{f.base, f.digits, level, idx};
          if (!q.run()) return;
          if (level == depth) {
            occ[idx] = 1;
            return;
          }
          walk(2 * idx, level + 1);
          walk(2 * idx + 1, level + 1);
        }
      };
      Walker{f, depth, occ}.walk(0, 0);
      // torus wrap: the last cell's closure contains the point 0
      if (std::binary_search(f.digits.begin(), f.digits.end(), 0)) occ[n - 1] = 1;
      break;
    }
  }
  return occ;
}

std::uint64_t TargetSet::factor_count(int coord, int depth) const {
  if (coord < 0 || coord >= d_) throw std::invalid_argument("factor coordinate out of range");
  if (depth < 0 || depth > 40) throw std::invalid_argument("factor depth out of range");
  const Factor& f = factors_[static_cast<std::size_t>(coord)];
  switch (f.kind) {
    case Factor::Free:
      return 1ull << depth;
    case Factor::Fixed: {
      double t = std::ldexp(f.value + 0.5, depth);
      return t == std::floor(t) ? 2 : 1;
    }
    case Factor::Cantor: {
      if ((f.base & (f.base - 1)) == 0) {
        // aligned mode: count via the digit structure level by level
        int q = 0;
        while ((1 << q) < f.base) ++q;
        // number of distinct t-bit prefixes of allowed digits
        auto prefixes = [&](int t) {
          std::vector<int> seen;
          for (int d : f.digits) {
            int p = d >> (q - t);
            if (!std::binary_search(seen.begin(), seen.end(), p)) {
              seen.insert(std::lower_bound(seen.begin(), seen.end(), p), p);
            }
          }
          return static_cast<std::uint64_t>(seen.size());
        };
        std::uint64_t full = static_cast<std::uint64_t>(depth) / q;
        int rem = depth - static_cast<int>(full) * q;
        std::uint64_t count = 1;
        for (std::uint64_t i = 0; i < full; ++i)
          count *= static_cast<std::uint64_t>(f.digits.size());
        if (rem > 0) count *= prefixes(rem);
        return count;
      }
      struct Counter {
        const Factor& f;
        int depth;
        std::uint64_t count = 0;
        bool zero_cell_hit = false;
        void walk(std::uint64_t idx, int level) {
          CantorMeets q{f.base, f.digits, level, idx};
          if (!q.run()) return;
          if (level == depth) {
            ++count;
            if (idx == (1ull << depth) - 1) zero_cell_hit = true;
            return;
          }
          walk(2 * idx, level + 1);
          walk(2 * idx + 1, level + 1);
        }
      };
      Counter c{f, depth};
      c.walk(0, 0);
      if (std::binary_search(f.digits.begin(), f.digits.end(), 0) && !c.zero_cell_hit)
        ++c.count;  // wrap cell
      return c.count;
    }
  }
  return 0;
}

OccupancyGrid TargetSet::rasterize(int depth) const {
  std::array<int, kMaxDim> depths{};
  for (int i = 0; i < d_; ++i) depths[static_cast<std::size_t>(i)] = depth;
  return rasterize(std::span<const int>(depths.data(), static_cast<std::size_t>(d_)));
}

OccupancyGrid TargetSet::rasterize(std::span<const int> depths) const {
  if (static_cast<int>(depths.size()) != d_)
    throw std::invalid_argument("rasterize: depths size mismatch");
  OccupancyGrid grid(d_, depths);
  bool all_free = true;
  for (const auto& f : factors_) all_free &= f.kind == Factor::Free;
  if (all_free) {
    grid.fill();
    return grid;
  }
  std::vector<std::vector<std::uint32_t>> occ_lists;
  occ_lists.reserve(static_cast<std::size_t>(d_));
  for (int i = 0; i < d_; ++i) {
    auto occ = factor_occupancy(i, depths[static_cast<std::size_t>(i)]);
    std::vector<std::uint32_t> list;
    for (std::uint32_t j = 0; j < occ.size(); ++j)
      if (occ[j]) list.push_back(j);
    occ_lists.push_back(std::move(list));
  }
  // product fill
  std::array<std::uint32_t, kMaxDim> cell{};
  std::array<std::size_t, kMaxDim> pos{};
  while (true) {
    for (int i = 0; i < d_; ++i)
      cell[static_cast<std::size_t>(i)] =
          occ_lists[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]];
    grid.set_cell(std::span<const std::uint32_t>(cell.data(), static_cast<std::size_t>(d_)));
    int i = d_ - 1;
    while (i >= 0) {
      if (++pos[static_cast<std::size_t>(i)] <
          occ_lists[static_cast<std::size_t>(i)].size())
        break;
      pos[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return grid;
}

double TargetSet::count_cells(std::span<const int> depths) const {
  if (static_cast<int>(depths.size()) != d_)
    throw std::invalid_argument("count_cells: depths size mismatch");
  double prod = 1;
  for (int i = 0; i < d_; ++i)
    prod *= static_cast<double>(factor_count(i, depths[static_cast<std::size_t>(i)]));
  return prod;
}

std::string TargetSet::describe() const {
  std::ostringstream os;
  bool cantor = false;
  for (const auto& f : factors_) cantor |= f.kind == Factor::Cantor;
  if (cantor) {
    os << "digit_cantor(";
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) os << " x ";
      const auto& f = factors_[i];
      if (f.kind == Factor::Cantor) {
        os << "b" << f.base << "{";
        for (std::size_t j = 0; j < f.digits.size(); ++j)
          os << (j ? "," : "") << f.digits[j];
        os << "}";
      } else if (f.kind == Factor::Free) {
        os << "full";
      } else {
        os << "fixed(" << f.value << ")";
      }
    }
    os << ")";
  } else {
    int fixed = 0;
    for (const auto& f : factors_) fixed += f.kind == Factor::Fixed;
    if (fixed == 0) {
      os << "full_torus(d=" << d_ << ")";
    } else {
      os << "affine_slice(d=" << d_ << ", fixed ";
      bool first = true;
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].kind == Factor::Fixed) {
          os << (first ? "" : ", ") << "x" << (i + 1) << "=" << factors_[i].value;
          first = false;
        }
      }
      os << ")";
    }
  }
  return os.str();
}

}  // namespace covset
