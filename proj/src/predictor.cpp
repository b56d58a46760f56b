#include "covset/predictor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace covset {

double svf_exponent(const SnowflakeExponents& H, double s) {
  int d = H.dim();
  if (!(s >= 0.0 && s <= static_cast<double>(d)))
    throw std::invalid_argument("svf: s must lie in [0, d]");
  int k = static_cast<int>(std::floor(s));
  double frac = s - k;
  if (k == d) {  // s == d: fractional part vanishes
    k = d;
    frac = 0;
  }
  double e = 0;
  for (int i = 0; i < k; ++i) e += 1.0 / H.h(i);
  if (frac > 0) e += frac / H.h(k);
  return e;
}

double svf_phi(const SnowflakeExponents& H, double r, double s) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("svf: r must lie in (0,1)");
  return std::pow(r, svf_exponent(H, s));
}

double s0_rect(const SnowflakeExponents& H, const RadiusSequence& seq) {
  if (!seq.generative())
    throw std::invalid_argument("s0_rect: sequence must be a generative kind");
  // the uncapped growth exponent; the cap min{d, .} is applied at the end
  double alpha = growth_exponent(seq).value;
  int d = H.dim();
  int k0 = 0;
  double inv_acc = 0;
  for (int k = 1; k <= d; ++k) {
    inv_acc += 1.0 / H.h(k - 1);
    if (inv_acc <= alpha)
      k0 = k;
    else
      break;
  }
  if (k0 == d) return static_cast<double>(d);
  double s0 = alpha * H.h(k0);
  for (int i = 0; i < k0; ++i) s0 += 1.0 - H.h(k0) / H.h(i);
  return std::min(static_cast<double>(d), s0);
}

namespace {

// Decade growth of partial sums of sum r_n^e: terms ~ n^{-e/a}; the last two
// decade increments have ratio 10^{1-e/a}, so ratio >= 1 flags divergence.
bool series_diverges(const std::vector<double>& log_n, double a, double e) {
  double expo = e / a;
  long double s4 = 0, s5 = 0, s6 = 0;
  long double acc = 0;
  for (std::uint64_t n = 1; n <= 1000000; ++n) {
    acc += std::exp(-expo * log_n[n]);
    if (n == 10000) s4 = acc;
    if (n == 100000) s5 = acc;
    if (n == 1000000) s6 = acc;
  }
  long double d1 = s5 - s4, d2 = s6 - s5;
  if (d2 <= 0) return false;
  return d2 >= d1 * (1.0L - 1e-6L);
}

}  // namespace

double s0_series_crosscheck(const SnowflakeExponents& H, const RadiusSequence& seq,
                            const SeriesCrosscheckOptions& opt) {
  if (seq.kind() != RadiusKind::PowerLaw)
    throw std::invalid_argument("s0_series_crosscheck: power-law sequences only");
  std::vector<double> log_n(1000001);
  for (std::uint64_t n = 1; n <= 1000000; ++n)
    log_n[n] = std::log(static_cast<double>(n));
  double a = seq.power_a();
  auto diverges = [&](double s) { return series_diverges(log_n, a, svf_exponent(H, s)); };
  double lo = opt.s_lo;
  double hi = opt.s_hi < 0 ? static_cast<double>(H.dim()) : opt.s_hi;
  if (!diverges(lo)) return lo;
  if (diverges(hi)) return hi;
  for (int it = 0; it < opt.bisect_iters; ++it) {
    double mid = 0.5 * (lo + hi);
    if (diverges(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::AvoidAS:
      return "AvoidAS";
    case Regime::HitHausdorff:
      return "HitAS_Hausdorff";
    case Regime::HitPacking:
      return "HitAS_Packing";
    case Regime::Indeterminate:
      return "Indeterminate";
  }
  return "?";
}

RegimeVerdict classify_hitting(double t, double alpha, double dim_h, double dim_p,
                               bool condition_c) {
  if (!(dim_h >= 0 && dim_h <= dim_p && dim_p <= t))
    throw std::invalid_argument("classify_hitting: need 0 <= dim_h <= dim_p <= t");
  if (!(alpha >= 0 && alpha <= t))
    throw std::invalid_argument("classify_hitting: need 0 <= alpha <= t");
  RegimeVerdict v;
  v.t = t;
  v.alpha = alpha;
  v.dim_h = dim_h;
  v.dim_p = dim_p;
  v.condition_c = condition_c;
  double gap = t - alpha;
  if (dim_p < gap)
    v.regime = Regime::AvoidAS;
  else if (dim_h > gap)
    v.regime = Regime::HitHausdorff;
  else if (dim_p > gap && condition_c)
    v.regime = Regime::HitPacking;
  else
    v.regime = Regime::Indeterminate;  // boundary equalities included
  return v;
}

IntersectBounds intersect_bounds(double t, double alpha, double dim_h, double dim_p) {
  if (!(dim_h >= 0 && dim_h <= dim_p && dim_p <= t))
    throw std::invalid_argument("intersect_bounds: need 0 <= dim_h <= dim_p <= t");
  if (!(alpha >= 0 && alpha <= t))
    throw std::invalid_argument("intersect_bounds: need 0 <= alpha <= t");
  IntersectBounds b;
  b.lower = std::max(0.0, alpha + dim_h - t);
  b.upper = std::max(0.0, alpha + dim_p - t);
  b.applicable = true;
  b.reason = "ball-generated covering set in a t-regular space";
  return b;
}

TorusUpper torus_upper(double s0, int d, double dim_p_F) {
  if (!(s0 >= 0 && s0 <= static_cast<double>(d)))
    throw std::invalid_argument("torus_upper: s0 must lie in [0, d]");
  TorusUpper u;
  if (dim_p_F < static_cast<double>(d) - s0) {
    u.empty_as = true;
    u.upper = 0;
  } else {
    u.empty_as = false;
    u.upper = s0 + dim_p_F - static_cast<double>(d);
  }
  return u;
}

RotatedLower rotated_lower(double s0_rot, int d, double dim_h_F) {
  if (!(s0_rot >= 0 && s0_rot <= static_cast<double>(d)))
    throw std::invalid_argument("rotated_lower: s0 must lie in [0, d]");
  RotatedLower r;
  double dd = static_cast<double>(d);
  if (!(dim_h_F > dd - s0_rot)) {
    std::ostringstream os;
    os << "dim_h F = " << dim_h_F << " <= d - s0R = " << (dd - s0_rot);
    r.reason = os.str();
    return r;
  }
  if (!(std::max(s0_rot, dim_h_F) > 0.5 * (dd + 1))) {
    std::ostringstream os;
    os << "max{s0R, dim_h F} = " << std::max(s0_rot, dim_h_F)
       << " <= (d+1)/2 = " << 0.5 * (dd + 1);
    r.reason = os.str();
    return r;
  }
  r.applies = true;
  r.lower = s0_rot + dim_h_F - dd;
  r.reason = "hypotheses verified";
  return r;
}

RegimeVerdict SnowflakeProfile::classify(double dim_h_kappa, double dim_p_kappa,
                                         bool condition_c) const {
  return classify_hitting(t, alpha, dim_h_kappa, dim_p_kappa, condition_c);
}

IntersectBounds SnowflakeProfile::bounds(double dim_h_kappa,
                                         double dim_p_kappa) const {
  return intersect_bounds(t, alpha, dim_h_kappa, dim_p_kappa);
}

SnowflakeProfile snowflake_profile(const SnowflakeExponents& H,
                                   const RadiusSequence& seq) {
  if (!seq.generative())
    throw std::invalid_argument("snowflake_profile: sequence must be generative");
  SnowflakeProfile p;
  p.H = H;
  p.t = H.inv_sum();
  p.alpha = std::min(p.t, growth_exponent(seq).value);
  return p;
}

}  // namespace covset
