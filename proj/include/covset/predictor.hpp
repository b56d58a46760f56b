#pragma once

// Closed-form theory: the singular value function, the almost-sure dimension
// s0 of rectangle covering sets, hitting-regime classification, intersection
// bounds, torus upper bounds, the rotated lower bound, and snowflake profiles.

#include <string>

#include "covset/geometry.hpp"
#include "covset/radii.hpp"

namespace covset {

// Phi^s of the rectangle with sides r^{1/H_i}: r^{sum_{i<=|s|} 1/H_i + {s}/H_{|s|+1}}.
double svf_phi(const SnowflakeExponents& H, double r, double s);
double svf_exponent(const SnowflakeExponents& H, double s);

// Almost-sure dimension of the axis-rectangle covering set:
// min{d, alpha*H_{k0+1} + sum_{i<=k0} (1 - H_{k0+1}/H_i)} with the uncapped
// growth exponent alpha and k0 = max{k : sum_{i<=k} 1/H_i <= alpha}.
double s0_rect(const SnowflakeExponents& H, const RadiusSequence& seq);

struct SeriesCrosscheckOptions {
  double s_lo = 0.0;
  double s_hi = -1.0;  // default: d
  int bisect_iters = 48;
};
// Convergence threshold of sum_n Phi^s(A_n), estimated from partial-sum
// growth at N = 1e3..1e6 and bisection on s.
double s0_series_crosscheck(const SnowflakeExponents& H, const RadiusSequence& seq,
                            const SeriesCrosscheckOptions& opt = {});

enum class Regime { AvoidAS, HitHausdorff, HitPacking, Indeterminate };

const char* regime_name(Regime r);

struct RegimeVerdict {
  Regime regime = Regime::Indeterminate;
  double t = 0, alpha = 0, dim_h = 0, dim_p = 0;
  bool condition_c = false;
};

// Three-branch classification of P(E(x) hits F): avoid when dim_p F < t-alpha,
// hit when dim_h F > t-alpha, hit when dim_p F > t-alpha under condition (C);
// boundary equalities are Indeterminate.
RegimeVerdict classify_hitting(double t, double alpha, double dim_h, double dim_p,
                               bool condition_c);

struct IntersectBounds {
  double lower = 0, upper = 0;
  bool applicable = true;
  std::string reason;
};

// max{0, alpha + dim_h F - t} <= dim_h(E x F-intersection) <= max{0, alpha + dim_p F - t}.
IntersectBounds intersect_bounds(double t, double alpha, double dim_h, double dim_p);

struct TorusUpper {
  bool empty_as = false;  // E(x) and F are a.s. disjoint
  double upper = 0;       // valid when !empty_as
};
TorusUpper torus_upper(double s0, int d, double dim_p_F);

struct RotatedLower {
  bool applies = false;
  double lower = 0;
  std::string reason;  // names the violated inequality when !applies
};
RotatedLower rotated_lower(double s0_rot, int d, double dim_h_F);

struct SnowflakeProfile {
  double t = 0;      // sum_i 1/H_i
  double alpha = 0;  // min{t, growth exponent}
  SnowflakeExponents H = SnowflakeExponents::isotropic(1);

  RegimeVerdict classify(double dim_h_kappa, double dim_p_kappa,
                         bool condition_c) const;
  IntersectBounds bounds(double dim_h_kappa, double dim_p_kappa) const;
};

SnowflakeProfile snowflake_profile(const SnowflakeExponents& H,
                                   const RadiusSequence& seq);

}  // namespace covset
