#include "covset/radii.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covset/errors.hpp"

namespace covset {

RadiusSequence RadiusSequence::power_law(double c, double a) {
  if (!(c > 0.0 && c < 1.0))
    throw std::invalid_argument("power_law: c must lie in (0,1) so that r_1 < 1");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("power_law: a must be positive");
  RadiusSequence s;
  s.kind_ = RadiusKind::PowerLaw;
  s.c_ = c;
  s.a_ = a;
  return s;
}

RadiusSequence RadiusSequence::geometric(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("geometric: lambda must lie in (0,1)");
  RadiusSequence s;
  s.kind_ = RadiusKind::Geometric;
  s.lambda_ = lambda;
  return s;
}

RadiusSequence RadiusSequence::explicit_list(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("explicit_list: empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0))
      throw std::invalid_argument("explicit_list: all r_n must lie in (0,1)");
    if (i > 0 && values[i] > values[i - 1])
      throw std::invalid_argument("explicit_list: sequence must be non-increasing");
  }
  if (values.size() > 1 && !(values.back() < values.front()))
    throw std::invalid_argument("explicit_list: last value must be < first value");
  RadiusSequence s;
  s.kind_ = RadiusKind::Explicit;
  s.values_ = std::move(values);
  return s;
}

double RadiusSequence::at(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("radius index is 1-based");
  switch (kind_) {
    case RadiusKind::PowerLaw:
      return c_ * std::pow(static_cast<double>(n), -1.0 / a_);
    case RadiusKind::Geometric:
      return std::pow(lambda_, static_cast<double>(n));
    case RadiusKind::Explicit:
      if (n > values_.size()) throw std::out_of_range("explicit radius index");
      return values_[n - 1];
  }
  return 0;
}

std::uint64_t RadiusSequence::max_index() const {
  return kind_ == RadiusKind::Explicit ? values_.size() : UINT64_MAX;
}

std::uint64_t RadiusSequence::last_index_at_least(double threshold) const {
  if (threshold <= 0) throw std::invalid_argument("threshold must be positive");
  switch (kind_) {
    case RadiusKind::PowerLaw: {
      if (c_ < threshold) return 0;
      // r_n >= thr  <=>  n <= (c/thr)^a; guess and fix up by direct comparison.
      double guess = std::pow(c_ / threshold, a_);
      if (guess > 9.2e18) throw resource_limit_error("bucket enumeration too large");
      std::uint64_t n = static_cast<std::uint64_t>(std::max(0.0, std::floor(guess)));
      while (n >= 1 && at(n) < threshold) --n;
      while (at(n + 1) >= threshold) ++n;
      return n;
    }
    case RadiusKind::Geometric: {
      if (lambda_ < threshold) return 0;
      double guess = std::log(threshold) / std::log(lambda_);
      std::uint64_t n = static_cast<std::uint64_t>(std::max(0.0, std::floor(guess)));
      while (n >= 1 && at(n) < threshold) --n;
      while (at(n + 1) >= threshold) ++n;
      return n;
    }
    case RadiusKind::Explicit: {
      // values_ are non-increasing
      auto it = std::lower_bound(values_.begin(), values_.end(), threshold,
                                 [](double v, double thr) { return v >= thr; });
      return static_cast<std::uint64_t>(it - values_.begin());
    }
  }
  return 0;
}

AlphaEstimate growth_exponent(const RadiusSequence& seq) {
  switch (seq.kind()) {
    case RadiusKind::PowerLaw:
      return {seq.power_a(), false};
    case RadiusKind::Geometric:
      return {0.0, false};
    case RadiusKind::Explicit: {
      const auto& v = seq.values();
      if (v.size() < 8) throw std::invalid_argument("insufficient data");
      // limsup is not computable from finite data: report the max of
      // log n / (-log r_n) over the tail half, flagged as truncated.
      double best = 0.0;
      for (std::size_t i = v.size() / 2; i < v.size(); ++i) {
        double n = static_cast<double>(i + 1);
        best = std::max(best, std::log(n) / (-std::log(v[i])));
      }
      return {best, true};
    }
  }
  return {0.0, false};
}

AlphaEstimate alpha_of(const RadiusSequence& seq, double t) {
  if (!(t > 0)) throw std::invalid_argument("alpha_of: t must be positive");
  AlphaEstimate g = growth_exponent(seq);
  return {std::min(t, g.value), g.truncated};
}

int bucket_of(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("bucket_of: r must lie in (0,1)");
  int e = 0;
  std::frexp(r, &e);  // r = m * 2^e, m in [1/2, 1)  =>  r in [2^(e-1), 2^e)
  return -e;
}

std::uint64_t BucketTable::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::pair<std::uint64_t, std::uint64_t> bucket_bounds(const RadiusSequence& seq,
                                                      int k) {
  if (k < 0) throw std::invalid_argument("bucket index must be >= 0");
  double lo_thr = std::ldexp(1.0, -(k + 1));
  double hi_thr = std::ldexp(1.0, -k);  // N_k = {n : lo_thr <= r_n < hi_thr}
  std::uint64_t before = seq.last_index_at_least(hi_thr);
  std::uint64_t last = seq.last_index_at_least(lo_thr);
  return {before + 1, last};
}

BucketTable buckets(const RadiusSequence& seq, int kmax) {
  if (kmax < 0) throw std::invalid_argument("buckets: kmax must be >= 0");
  if (seq.kind() == RadiusKind::PowerLaw) {
    double bound = std::pow(seq.power_c() * std::ldexp(1.0, kmax + 1), seq.power_a());
    if (bound > static_cast<double>(limits::max_enumeration()))
      throw resource_limit_error("bucket enumeration too large");
  }
  BucketTable table;
  table.kmax = kmax;
  table.counts.resize(static_cast<std::size_t>(kmax) + 1, 0);
  std::uint64_t prev = seq.last_index_at_least(1.0);  // always 0: r_n < 1
  for (int k = 0; k <= kmax; ++k) {
    std::uint64_t last = seq.last_index_at_least(std::ldexp(1.0, -(k + 1)));
    if (last > limits::max_enumeration())
      throw resource_limit_error("bucket enumeration too large");
    table.counts[static_cast<std::size_t>(k)] = last - prev;
    prev = last;
  }
  // enumeration conceptually ran one index past the last bucketed n
  table.truncation = std::min(prev + 1, seq.max_index());
  return table;
}

double series_sum(const RadiusSequence& seq, double s, std::uint64_t N) {
  if (N < 1) throw std::invalid_argument("series_sum: N must be >= 1");
  if (s < 0) throw std::invalid_argument("series_sum: s must be >= 0");
  N = std::min(N, seq.max_index());
  long double acc = 0.0L;
  if (seq.kind() == RadiusKind::PowerLaw) {
    long double cs = std::pow(static_cast<long double>(seq.power_c()),
                              static_cast<long double>(s));
    long double expo = static_cast<long double>(s) / seq.power_a();
    for (std::uint64_t n = 1; n <= N; ++n)
      acc += cs * std::pow(static_cast<long double>(n), -expo);
  } else {
    for (std::uint64_t n = 1; n <= N; ++n)
      acc += std::pow(static_cast<long double>(seq.at(n)),
                      static_cast<long double>(s));
  }
  return static_cast<double>(acc);
}

static ConditionCResult holds_with_identity_witness(int kmax, double alpha,
                                                    const std::string& note) {
  ConditionCResult r;
  r.status = ConditionCStatus::Holds;
  r.alpha = alpha;
  r.witness.resize(static_cast<std::size_t>(kmax));
  for (int i = 1; i <= kmax; ++i) r.witness[static_cast<std::size_t>(i - 1)] = i;
  r.note = note;
  return r;
}

ConditionCResult condition_c_from_buckets(const BucketTable& table, double alpha,
                                          bool truncated_data, double tol) {
  ConditionCResult r;
  r.alpha = alpha;
  r.truncated = truncated_data;
  std::vector<int> cands;
  for (int k = 1; k <= table.kmax; ++k) {
    std::uint64_t n_k = table.counts[static_cast<std::size_t>(k)];
    if (n_k == 0) continue;
    double rate = std::log2(static_cast<double>(n_k)) / k;
    if (std::fabs(rate - alpha) <= tol) cands.push_back(k);
  }
  // longest run of candidates with consecutive ratio <= 1 + tol
  std::vector<int> best, cur;
  for (int k : cands) {
    if (!cur.empty() &&
        static_cast<double>(k) / cur.back() <= 1.0 + tol) {
      cur.push_back(k);
    } else {
      cur = {k};
    }
    if (cur.size() > best.size()) best = cur;
  }
  bool deep = !best.empty() && best.back() >= table.kmax - 2;
  if (best.size() >= 3 && deep) {
    r.status = ConditionCStatus::Holds;
    r.witness = best;
    r.note = "candidate subsequence found in truncated bucket data";
  } else if (truncated_data) {
    r.status = ConditionCStatus::Inconclusive;
    r.note = cands.empty()
                 ? "no bucket matches the rate alpha at this truncation"
                 : "no admissible ratio chain among candidates at this truncation";
  } else {
    r.status = ConditionCStatus::Fails;
    r.note = "no subsequence with the required rate exists";
  }
  return r;
}

ConditionCResult condition_c_check(const RadiusSequence& seq, double t, int kmax,
                                   double tol) {
  if (kmax < 16) throw std::invalid_argument("condition_c_check: kmax must be >= 16");
  if (!(t > 0)) throw std::invalid_argument("condition_c_check: t must be positive");
  switch (seq.kind()) {
    case RadiusKind::PowerLaw: {
      double a = seq.power_a();
      if (a <= t)
        return holds_with_identity_witness(kmax, a,
                                           "power law: log2 n_k / k -> a = alpha");
      ConditionCResult r;
      r.status = ConditionCStatus::Fails;
      r.alpha = t;
      r.note = "power law with a > t: log2 n_k / k -> a exceeds alpha = t";
      return r;
    }
    case RadiusKind::Geometric:
      return holds_with_identity_witness(kmax, 0.0,
                                         "geometric: n_k <= 1, log2 n_k / k -> 0 = alpha");
    case RadiusKind::Explicit: {
      BucketTable table = buckets(seq, kmax);
      AlphaEstimate a = alpha_of(seq, t);
      return condition_c_from_buckets(table, a.value, true, tol);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace covset
