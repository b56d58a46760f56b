#pragma once

// Radius sequences (r_n), their growth exponent alpha, dyadic buckets
// N_k = {n : 2^-(k+1) <= r_n < 2^-k}, truncated series sums, and the
// finite-data check of condition (C).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace covset {

enum class RadiusKind { PowerLaw, Geometric, Explicit };

class RadiusSequence {
 public:
  // r_n = c * n^(-1/a), 0 < c < 1, a > 0.
  static RadiusSequence power_law(double c, double a);
  // r_n = lambda^n, lambda in (0,1).
  static RadiusSequence geometric(double lambda);
  // Validated: non-increasing, all in (0,1), last < first.
  static RadiusSequence explicit_list(std::vector<double> values);

  RadiusKind kind() const { return kind_; }
  bool generative() const { return kind_ != RadiusKind::Explicit; }
  double at(std::uint64_t n) const;  // 1-based
  std::uint64_t max_index() const;   // Explicit: list size, else UINT64_MAX
  double power_c() const { return c_; }
  double power_a() const { return a_; }
  double geometric_ratio() const { return lambda_; }
  const std::vector<double>& values() const { return values_; }

  // Largest n with r_n >= threshold (0 if none), capped at max_index().
  std::uint64_t last_index_at_least(double threshold) const;

 private:
  RadiusSequence() = default;
  RadiusKind kind_ = RadiusKind::PowerLaw;
  double c_ = 0, a_ = 0, lambda_ = 0;
  std::vector<double> values_;
};

struct AlphaEstimate {
  double value = 0;
  bool truncated = false;  // set for Explicit sequences (finite-data estimate)
};

// Uncapped limsup log n / (-log r_n). Explicit: max over the tail half.
AlphaEstimate growth_exponent(const RadiusSequence& seq);
// alpha = min{t, growth exponent}.
AlphaEstimate alpha_of(const RadiusSequence& seq, double t);

// k with 2^-(k+1) <= r < 2^-k; exact via frexp. Requires r in (0,1).
int bucket_of(double r);

struct BucketTable {
  int kmax = 0;
  std::vector<std::uint64_t> counts;  // n_0 .. n_kmax
  std::uint64_t truncation = 0;       // largest index n enumerated
  std::uint64_t total() const;
};

// Index range of N_k as [first, last]; first > last means empty bucket.
std::pair<std::uint64_t, std::uint64_t> bucket_bounds(const RadiusSequence& seq,
                                                      int k);

BucketTable buckets(const RadiusSequence& seq, int kmax);

// sum_{n=1..N} r_n^s, accumulated in extended precision.
double series_sum(const RadiusSequence& seq, double s, std::uint64_t N);

enum class ConditionCStatus { Holds, Fails, Inconclusive };

struct ConditionCResult {
  ConditionCStatus status = ConditionCStatus::Inconclusive;
  std::vector<int> witness;  // subsequence k_i when Holds
  double alpha = 0;
  bool truncated = false;
  std::string note;
};

// Finite-data verdict on condition (C): existence of k_i with
// k_{i+1}/k_i -> 1 and log2(n_{k_i})/k_i -> alpha. Generative kinds get
// closed-form verdicts; Explicit data is searched and never yields Fails
// (truncation keeps Fails unprovable), only Holds or Inconclusive.
ConditionCResult condition_c_check(const RadiusSequence& seq, double t, int kmax,
                                   double tol = 0.1);

// Search already-computed bucket data (also used on synthetic tables).
ConditionCResult condition_c_from_buckets(const BucketTable& table, double alpha,
                                          bool truncated_data, double tol = 0.1);

}  // namespace covset
