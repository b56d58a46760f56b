#include "covset/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "covset/coversim.hpp"
#include "covset/errors.hpp"
#include "covset/percolation.hpp"
#include "covset/predictor.hpp"

namespace covset {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw config_error("field '" + field + "': " + why);
}

double get_num(const json& j, const std::string& field, double fallback,
               bool required = false) {
  if (!j.contains(field)) {
    if (required) bad_field(field, "missing");
    return fallback;
  }
  if (!j[field].is_number()) bad_field(field, "must be a number");
  return j[field].get<double>();
}

std::int64_t get_int(const json& j, const std::string& field, std::int64_t fallback,
                     bool required = false) {
  if (!j.contains(field)) {
    if (required) bad_field(field, "missing");
    return fallback;
  }
  if (!j[field].is_number_integer()) bad_field(field, "must be an integer");
  return j[field].get<std::int64_t>();
}

RadiusSequence parse_seq(const json& cfg, const std::string& prefix) {
  if (!cfg.is_object()) bad_field(prefix, "must be an object");
  std::string kind = cfg.value("kind", "");
  try {
    if (kind == "power_law")
      return RadiusSequence::power_law(get_num(cfg, "c", 0, true),
                                       get_num(cfg, "a", 0, true));
    if (kind == "geometric")
      return RadiusSequence::geometric(get_num(cfg, "lambda", 0, true));
    if (kind == "explicit") {
      if (!cfg.contains("values") || !cfg["values"].is_array())
        bad_field(prefix + ".values", "missing array");
      return RadiusSequence::explicit_list(cfg["values"].get<std::vector<double>>());
    }
  } catch (const std::invalid_argument& e) {
    bad_field(prefix, e.what());
  }
  bad_field(prefix + ".kind", "must be power_law | geometric | explicit");
}

SnowflakeExponents parse_exponents(const json& arr, const std::string& field) {
  if (!arr.is_array() || arr.empty()) bad_field(field, "must be a non-empty array");
  auto h = arr.get<std::vector<double>>();
  try {
    return SnowflakeExponents(std::span<const double>(h.data(), h.size()));
  } catch (const std::invalid_argument& e) {
    bad_field(field, e.what());
  }
}

ShapeFamily parse_shape(const json& cfg, int d) {
  ShapeFamily fam;
  if (!cfg.is_object()) bad_field("shape", "must be an object");
  std::string kind = cfg.value("kind", "ball");
  if (kind == "ball") {
    fam.kind = ShapeKind::Ball;
    return fam;
  }
  if (kind == "axis_rect" || kind == "rotated_rect") {
    fam.kind = kind == "axis_rect" ? ShapeKind::AxisRect : ShapeKind::RotatedRect;
    if (!cfg.contains("H")) bad_field("shape.H", "missing");
    fam.H = parse_exponents(cfg["H"], "shape.H");
    if (fam.H->dim() != d) bad_field("shape.H", "dimension mismatch with d");
    return fam;
  }
  bad_field("shape.kind", "must be ball | axis_rect | rotated_rect");
}

TargetSet parse_target(const json& cfg) {
  if (!cfg.is_object()) bad_field("target", "must be an object");
  std::string kind = cfg.value("kind", "");
  try {
    if (kind == "digit_cantor") {
      auto base = static_cast<int>(get_int(cfg, "base", 0, true));
      if (!cfg.contains("digits") || !cfg["digits"].is_array())
        bad_field("target.digits", "missing array of digit sets");
      auto digits = cfg["digits"].get<std::vector<std::vector<int>>>();
      return TargetSet::digit_cantor(base, std::move(digits));
    }
    if (kind == "affine_slice") {
      auto d = static_cast<int>(get_int(cfg, "d", 0, true));
      std::map<int, double> fixed;
      if (cfg.contains("fixed")) {
        if (!cfg["fixed"].is_object()) bad_field("target.fixed", "must be an object");
        for (const auto& [key, value] : cfg["fixed"].items())
          fixed[std::stoi(key)] = value.get<double>();
      }
      return TargetSet::affine_slice(d, fixed);
    }
    if (kind == "full_torus")
      return TargetSet::full_torus(static_cast<int>(get_int(cfg, "d", 0, true)));
  } catch (const std::invalid_argument& e) {
    bad_field("target", e.what());
  }
  bad_field("target.kind", "must be digit_cantor | affine_slice | full_torus");
}

SimWindow parse_window(const json& cfg, int d, ShapeFamily fam, RadiusSequence seq,
                       bool rotations) {
  if (!cfg.is_object()) bad_field("window", "must be an object");
  auto m0 = static_cast<int>(get_int(cfg, "m0", 0, true));
  auto m1 = static_cast<int>(get_int(cfg, "m1", 0, true));
  auto depth = static_cast<int>(get_int(cfg, "depth", 0, true));
  return SimWindow(d, m0, m1, depth, std::move(fam), std::move(seq), rotations);
}

struct Common {
  std::uint64_t seed = 1;
  int replicas = 0;
  int threads = 1;
};

Common parse_common(const json& cfg, int default_replicas) {
  Common c;
  c.seed = static_cast<std::uint64_t>(get_int(cfg, "seed", 1));
  c.replicas = static_cast<int>(get_int(cfg, "replicas", default_replicas));
  c.threads = static_cast<int>(get_int(cfg, "threads", 1));
  if (c.replicas < 1) bad_field("replicas", "must be >= 1");
  if (c.threads < 1) bad_field("threads", "must be >= 1");
  return c;
}

ordered_json seq_echo(const RadiusSequence& seq) {
  ordered_json j;
  switch (seq.kind()) {
    case RadiusKind::PowerLaw:
      j["kind"] = "power_law";
      j["c"] = seq.power_c();
      j["a"] = seq.power_a();
      break;
    case RadiusKind::Geometric:
      j["kind"] = "geometric";
      j["lambda"] = seq.geometric_ratio();
      break;
    case RadiusKind::Explicit:
      j["kind"] = "explicit";
      j["values"] = seq.values();
      break;
  }
  return j;
}

ordered_json window_echo(const SimWindow& w) {
  ordered_json j;
  j["m0"] = w.m0;
  j["m1"] = w.m1;
  j["depth"] = w.depth;
  return j;
}

ordered_json verdict_json(const RegimeVerdict& v) {
  ordered_json j;
  j["regime"] = regime_name(v.regime);
  j["t"] = v.t;
  j["alpha"] = v.alpha;
  j["dim_h_F"] = v.dim_h;
  j["dim_p_F"] = v.dim_p;
  j["condition_c"] = v.condition_c;
  return j;
}

ordered_json dim_rows_csv(const std::vector<std::optional<DimEstimate>>& per,
                          std::string* csv) {
  std::ostringstream os;
  os << "replica,j,N_j\n";
  ordered_json slopes = ordered_json::array();
  for (std::size_t rep = 0; rep < per.size(); ++rep) {
    if (!per[rep]) {
      slopes.push_back(nullptr);
      continue;
    }
    slopes.push_back(per[rep]->slope);
    for (std::size_t i = 0; i < per[rep]->js.size(); ++i)
      os << rep << "," << per[rep]->js[i] << "," << per[rep]->counts[i] << "\n";
  }
  if (csv) *csv = os.str();
  return slopes;
}

const char* cond_name(ConditionCStatus s) {
  switch (s) {
    case ConditionCStatus::Holds:
      return "Holds";
    case ConditionCStatus::Fails:
      return "Fails";
    case ConditionCStatus::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

// epsilon-family of the counter-example: H = (1, eps/(1+eps)), r_n = c n^{-eps}.
SnowflakeExponents eps_exponents(double eps) {
  return SnowflakeExponents({1.0, eps / (1.0 + eps)});
}

RunResult run_predict(const json& cfg) {
  auto d = static_cast<int>(get_int(cfg, "d", 0, true));
  if (d < 1 || d > kMaxDim) bad_field("d", "must lie in [1,4]");
  if (!cfg.contains("seq")) bad_field("seq", "missing");
  RadiusSequence seq = parse_seq(cfg["seq"], "seq");
  ShapeFamily fam = parse_shape(cfg.value("shape", json{{"kind", "ball"}}), d);
  auto kmax = static_cast<int>(get_int(cfg, "kmax", 32));

  ordered_json summary;
  summary["command"] = "predict";
  ordered_json config;
  config["d"] = d;
  config["seq"] = seq_echo(seq);
  config["shape"] = cfg.value("shape", json{{"kind", "ball"}});
  config["kmax"] = kmax;
  summary["config"] = config;

  ordered_json theory;
  AlphaEstimate raw = growth_exponent(seq);
  AlphaEstimate alpha = alpha_of(seq, static_cast<double>(d));
  theory["growth_exponent"] = raw.value;
  theory["alpha"] = alpha.value;  // capped at t = d
  theory["alpha_truncated_estimate"] = alpha.truncated;
  ConditionCResult cond = condition_c_check(seq, static_cast<double>(d), kmax);
  theory["condition_c"] = cond_name(cond.status);

  const SnowflakeExponents H =
      fam.H ? *fam.H : SnowflakeExponents::isotropic(d);
  double s0 = fam.kind == ShapeKind::Ball
                  ? std::min(static_cast<double>(d), raw.value)
                  : s0_rect(H, seq);
  theory["s0"] = s0;
  theory["s0_rotated"] = s0;  // rotations do not change the typical dimension

  SnowflakeProfile prof = snowflake_profile(H, seq);
  ordered_json sf;
  sf["t"] = prof.t;
  sf["alpha"] = prof.alpha;
  theory["snowflake"] = sf;

  if (cfg.contains("target")) {
    TargetSet F = parse_target(cfg["target"]);
    if (F.dim() != d) bad_field("target", "dimension mismatch with d");
    ordered_json tj;
    tj["description"] = F.describe();
    tj["dim_h"] = F.dim_h();
    tj["dim_p"] = F.dim_p();
    auto [kh, kp] = F.dims_snowflake(H);
    tj["dim_h_kappa"] = kh;
    tj["dim_p_kappa"] = kp;
    theory["target"] = tj;

    TorusUpper up = torus_upper(s0, d, F.dim_p());
    ordered_json uj;
    uj["empty_as"] = up.empty_as;
    if (!up.empty_as) uj["upper"] = up.upper;
    theory["torus_upper"] = uj;

    RotatedLower rl = rotated_lower(s0, d, F.dim_h());
    ordered_json rj;
    rj["applies"] = rl.applies;
    if (rl.applies)
      rj["lower"] = rl.lower;
    else
      rj["reason"] = rl.reason;
    theory["rotated_lower"] = rj;

    bool cc = cond.status == ConditionCStatus::Holds;
    theory["snowflake_verdict"] = verdict_json(prof.classify(kh, kp, cc));
    IntersectBounds ib = prof.bounds(kh, kp);
    ordered_json bj;
    bj["lower"] = ib.lower;
    bj["upper"] = ib.upper;
    theory["snowflake_intersect_bounds"] = bj;

    if (fam.kind == ShapeKind::Ball) {
      theory["verdict"] =
          verdict_json(classify_hitting(static_cast<double>(d), alpha.value,
                                        F.dim_h(), F.dim_p(), cc));
      IntersectBounds eb =
          intersect_bounds(static_cast<double>(d), alpha.value, F.dim_h(), F.dim_p());
      ordered_json ej;
      ej["lower"] = eb.lower;
      ej["upper"] = eb.upper;
      theory["intersect_bounds"] = ej;
    }
  }
  summary["theory"] = theory;
  return {summary, ""};
}

RunResult run_cover_dim(const json& cfg) {
  auto d = static_cast<int>(get_int(cfg, "d", 1));
  if (!cfg.contains("seq")) bad_field("seq", "missing");
  RadiusSequence seq = parse_seq(cfg["seq"], "seq");
  ShapeFamily fam = parse_shape(cfg.value("shape", json{{"kind", "ball"}}), d);
  if (!cfg.contains("window")) bad_field("window", "missing");
  Common common = parse_common(cfg, 20);
  SimWindow window = parse_window(cfg["window"], d, fam, seq, false);

  RngStream root = RngStream::root(common.seed);
  CoverDimResult res = cover_dim(window, common.replicas, root, common.threads);

  ordered_json summary;
  summary["command"] = "cover-dim";
  ordered_json config;
  config["d"] = d;
  config["seq"] = seq_echo(seq);
  config["shape"] = cfg.value("shape", json{{"kind", "ball"}});
  config["window"] = window_echo(window);
  config["replicas"] = common.replicas;
  config["seed"] = common.seed;
  summary["config"] = config;

  ordered_json theory;
  AlphaEstimate raw = growth_exponent(seq);
  theory["alpha"] = std::min(static_cast<double>(d), raw.value);
  if (fam.kind != ShapeKind::Ball) theory["s0"] = s0_rect(*fam.H, seq);
  summary["theory"] = theory;

  ordered_json emp;
  emp["estimator"] = "scale-matched generation counts, j in [m0, m1]";
  emp["median_slope"] = res.median_slope;
  emp["iqr"] = ordered_json::array({res.iqr_lo, res.iqr_hi});
  std::vector<std::optional<DimEstimate>> per;
  per.reserve(res.per_replica.size());
  for (const auto& e : res.per_replica) per.emplace_back(e);
  std::string csv;
  emp["slopes"] = dim_rows_csv(per, &csv);
  emp["proxy_occupied_fraction"] = res.proxy_fraction;
  summary["empirical"] = emp;
  return {summary, csv};
}

RunResult run_hit(const json& cfg) {
  auto d = static_cast<int>(get_int(cfg, "d", 1));
  if (!cfg.contains("seq")) bad_field("seq", "missing");
  if (!cfg.contains("target")) bad_field("target", "missing");
  if (!cfg.contains("window")) bad_field("window", "missing");
  RadiusSequence seq = parse_seq(cfg["seq"], "seq");
  ShapeFamily fam = parse_shape(cfg.value("shape", json{{"kind", "ball"}}), d);
  TargetSet F = parse_target(cfg["target"]);
  Common common = parse_common(cfg, 100);
  SimWindow window = parse_window(cfg["window"], d, fam, seq, false);

  RngStream root = RngStream::root(common.seed);
  HitFrequencyResult res = hitting_frequency(window, F, common.replicas, root,
                                             common.threads);

  ordered_json summary;
  summary["command"] = "hit";
  ordered_json config;
  config["d"] = d;
  config["seq"] = seq_echo(seq);
  config["shape"] = cfg.value("shape", json{{"kind", "ball"}});
  config["target"] = cfg["target"];
  config["window"] = window_echo(window);
  config["replicas"] = common.replicas;
  config["seed"] = common.seed;
  summary["config"] = config;

  ordered_json theory;
  double t = static_cast<double>(d);
  AlphaEstimate alpha = alpha_of(seq, t);
  ConditionCResult cond = condition_c_check(seq, t, 32);
  theory["t"] = t;
  theory["alpha"] = alpha.value;
  theory["condition_c"] = cond_name(cond.status);
  theory["target_dim_h"] = F.dim_h();
  theory["target_dim_p"] = F.dim_p();
  theory["verdict"] = verdict_json(
      classify_hitting(t, alpha.value, F.dim_h(), F.dim_p(),
                       cond.status == ConditionCStatus::Holds));
  summary["theory"] = theory;

  ordered_json emp;
  emp["frequency"] = res.frequency;
  emp["frequency_ci95"] = ordered_json::array({res.ci.lo, res.ci.hi});
  emp["hit_event"] = "every window generation meets the target raster";
  emp["frequency_common_cell"] = res.frequency_common;
  emp["frequency_common_cell_ci95"] =
      ordered_json::array({res.ci_common.lo, res.ci_common.hi});
  emp["empty_proxies"] = res.empty_proxies;
  emp["replicas"] = res.replicas;
  summary["empirical"] = emp;
  return {summary, ""};
}

RunResult run_intersect_dim(const json& cfg) {
  auto d = static_cast<int>(get_int(cfg, "d", 1));
  if (!cfg.contains("seq")) bad_field("seq", "missing");
  if (!cfg.contains("target")) bad_field("target", "missing");
  if (!cfg.contains("window")) bad_field("window", "missing");
  RadiusSequence seq = parse_seq(cfg["seq"], "seq");
  ShapeFamily fam = parse_shape(cfg.value("shape", json{{"kind", "ball"}}), d);
  TargetSet F = parse_target(cfg["target"]);
  Common common = parse_common(cfg, 30);
  SimWindow window = parse_window(cfg["window"], d, fam, seq, false);

  RngStream root = RngStream::root(common.seed);
  IntersectionDimResult res =
      intersection_dim(window, F, common.replicas, root, common.threads);

  ordered_json summary;
  summary["command"] = "intersect-dim";
  ordered_json config;
  config["d"] = d;
  config["seq"] = seq_echo(seq);
  config["shape"] = cfg.value("shape", json{{"kind", "ball"}});
  config["target"] = cfg["target"];
  config["window"] = window_echo(window);
  config["replicas"] = common.replicas;
  config["seed"] = common.seed;
  summary["config"] = config;

  ordered_json theory;
  double t = static_cast<double>(d);
  AlphaEstimate alpha = alpha_of(seq, t);
  theory["t"] = t;
  theory["alpha"] = alpha.value;
  IntersectBounds ib = intersect_bounds(t, alpha.value, F.dim_h(), F.dim_p());
  theory["predicted_dim"] = ib.lower;  // dim_h F = dim_p F for our targets
  theory["bounds"] = ordered_json::array({ib.lower, ib.upper});
  summary["theory"] = theory;

  ordered_json emp;
  emp["estimator"] = "scale-matched intersection counts, j in [max(m0, depth/2), m1]";
  emp["median_slope"] = res.median_slope;
  emp["iqr"] = ordered_json::array({res.iqr_lo, res.iqr_hi});
  emp["nonempty_replicas"] = res.nonempty;
  emp["replicas"] = res.replicas;
  std::string csv;
  emp["slopes"] = dim_rows_csv(res.per_replica, &csv);
  summary["empirical"] = emp;
  return {summary, csv};
}

// the section-3.3 counter-example family
struct EpsFamily {
  double eps;
  SnowflakeExponents H;
  RadiusSequence seq;
};

EpsFamily eps_family(double eps, double c) {
  if (!(eps > 0 && eps < 1)) bad_field("epsilon", "must lie in (0,1)");
  return {eps, eps_exponents(eps), RadiusSequence::power_law(c, 1.0 / eps)};
}

RunResult run_bad_case(const json& cfg) {
  double eps = get_num(cfg, "epsilon", 0.5);
  double b = get_num(cfg, "b", 0.37);
  auto n_max = static_cast<std::uint64_t>(get_int(cfg, "n_max", 1000000));
  auto proj_replicas = static_cast<int>(get_int(cfg, "proj_replicas", 10000));
  auto tail_k_min = static_cast<int>(get_int(cfg, "tail_k_min", 8));
  double c_proj = get_num(cfg, "c_proj", 1.0 - 1e-9);
  double c_sim = get_num(cfg, "c_sim", 0.92);
  Common common = parse_common(cfg, 50);
  json window_cfg = cfg.value("window", json{{"m0", 5}, {"m1", 8}, {"depth", 10}});

  EpsFamily proj_fam = eps_family(eps, c_proj);
  EpsFamily sim_fam = eps_family(eps, c_sim);

  ShapeFamily rect{ShapeKind::AxisRect, proj_fam.H};
  SimWindow proj_window(2, 1, 1, 1, rect, proj_fam.seq, false);
  ShapeFamily sim_rect{ShapeKind::AxisRect, sim_fam.H};
  SimWindow sim_window = parse_window(window_cfg, 2, sim_rect, sim_fam.seq, false);

  RngStream root = RngStream::root(common.seed);

  // (a) projection count: all generations up to n_max
  ProjectionCountParams pall{b, n_max, 0, 63};
  auto counts = projection_hit_counts(proj_window, pall, proj_replicas, root,
                                      common.threads);
  double mean = 0;
  for (auto cnt : counts) mean += cnt;
  mean /= static_cast<double>(counts.size());
  double var = 0;
  for (auto cnt : counts) var += (cnt - mean) * (cnt - mean);
  var /= static_cast<double>(counts.size());

  // partial-sum oracle sum_{n<=n_max} min(1, r_n^{1/H_2})
  long double oracle = 0;
  double inv_h2 = 1.0 / proj_fam.H.h(1);
  for (std::uint64_t n = 1; n <= n_max; ++n)
    oracle += std::min(1.0L, std::pow(static_cast<long double>(proj_fam.seq.at(n)),
                                      static_cast<long double>(inv_h2)));

  // (b) tail window k >= tail_k_min
  ProjectionCountParams ptail{b, n_max, tail_k_min, 63};
  auto tail_counts = projection_hit_counts(proj_window, ptail, proj_replicas,
                                           root.derive(101), common.threads);
  double tail_mean = 0;
  for (auto cnt : tail_counts) tail_mean += cnt;
  tail_mean /= static_cast<double>(tail_counts.size());
  long double tail_oracle = 0;
  {
    auto [first, last] = bucket_bounds(proj_fam.seq, tail_k_min);
    (void)last;
    for (std::uint64_t n = first; n <= n_max; ++n)
      tail_oracle += std::min(1.0L, std::pow(static_cast<long double>(proj_fam.seq.at(n)),
                                             static_cast<long double>(inv_h2)));
  }

  // (c) aligned 2-d hit frequency against the line target
  TargetSet line = TargetSet::affine_slice(2, {{2, b}});
  HitFrequencyResult aligned = hitting_frequency(sim_window, line, common.replicas,
                                                 root, common.threads);

  // (d) snowflake reclassification of the line
  SnowflakeProfile prof = snowflake_profile(proj_fam.H, proj_fam.seq);
  auto [kh, kp] = line.dims_snowflake(proj_fam.H);
  RegimeVerdict verdict = prof.classify(kh, kp, true);
  double s0 = s0_rect(proj_fam.H, proj_fam.seq);

  ordered_json summary;
  summary["command"] = "bad-case";
  ordered_json config;
  config["epsilon"] = eps;
  config["b"] = b;
  config["n_max"] = n_max;
  config["proj_replicas"] = proj_replicas;
  config["tail_k_min"] = tail_k_min;
  config["c_proj"] = c_proj;
  config["c_sim"] = c_sim;
  config["window"] = window_echo(sim_window);
  config["replicas"] = common.replicas;
  config["seed"] = common.seed;
  summary["config"] = config;

  ordered_json theory;
  theory["s0"] = s0;
  theory["H"] = ordered_json::array({1.0, proj_fam.H.h(1)});
  theory["torus_upper_line"] = s0 + 1.0 - 2.0;  // not attained: a.s. empty
  theory["projection_oracle"] = static_cast<double>(oracle);
  theory["tail_oracle"] = static_cast<double>(tail_oracle);
  ordered_json sf;
  sf["t"] = prof.t;
  sf["alpha"] = prof.alpha;
  sf["line_dim_h_kappa"] = kh;
  sf["line_dim_p_kappa"] = kp;
  sf["gap_t_minus_alpha"] = prof.t - prof.alpha;
  sf["verdict"] = verdict_json(verdict);
  theory["snowflake"] = sf;
  summary["theory"] = theory;

  ordered_json emp;
  emp["projection_mean"] = mean;
  emp["projection_se"] =
      std::sqrt(var / static_cast<double>(counts.size()));
  emp["tail_mean"] = tail_mean;
  emp["aligned_hit_frequency"] = aligned.frequency_common;
  emp["aligned_hit_frequency_ci95"] =
      ordered_json::array({aligned.ci_common.lo, aligned.ci_common.hi});
  emp["aligned_sustained_frequency"] = aligned.frequency;
  summary["empirical"] = emp;
  return {summary, ""};
}

RunResult run_rotate(const json& cfg) {
  double eps = get_num(cfg, "epsilon", 0.5);
  double b = get_num(cfg, "b", 0.37);
  double c_sim = get_num(cfg, "c_sim", 0.92);
  Common common = parse_common(cfg, 50);
  json window_cfg = cfg.value("window", json{{"m0", 5}, {"m1", 8}, {"depth", 10}});

  EpsFamily fam = eps_family(eps, c_sim);
  ShapeFamily aligned_fam{ShapeKind::AxisRect, fam.H};
  ShapeFamily rotated_fam{ShapeKind::RotatedRect, fam.H};
  SimWindow aligned_window = parse_window(window_cfg, 2, aligned_fam, fam.seq, false);
  SimWindow rotated_window = parse_window(window_cfg, 2, rotated_fam, fam.seq, true);

  TargetSet line = TargetSet::affine_slice(2, {{2, b}});
  RngStream root = RngStream::root(common.seed);
  // shared seeds: placements draw the translation before the rotation stream
  HitFrequencyResult aligned =
      hitting_frequency(aligned_window, line, common.replicas, root, common.threads);
  HitFrequencyResult rotated =
      hitting_frequency(rotated_window, line, common.replicas, root, common.threads);

  double s0 = s0_rect(fam.H, fam.seq);
  RotatedLower rl = rotated_lower(s0, 2, line.dim_h());

  ordered_json summary;
  summary["command"] = "rotate";
  ordered_json config;
  config["epsilon"] = eps;
  config["b"] = b;
  config["c_sim"] = c_sim;
  config["window"] = window_echo(aligned_window);
  config["replicas"] = common.replicas;
  config["seed"] = common.seed;
  summary["config"] = config;

  ordered_json theory;
  theory["s0"] = s0;
  theory["s0_rotated"] = s0;
  ordered_json rj;
  rj["applies"] = rl.applies;
  if (rl.applies)
    rj["lower"] = rl.lower;
  else
    rj["reason"] = rl.reason;
  theory["rotated_lower"] = rj;
  summary["theory"] = theory;

  ordered_json emp;
  emp["aligned_frequency"] = aligned.frequency_common;
  emp["aligned_ci95"] =
      ordered_json::array({aligned.ci_common.lo, aligned.ci_common.hi});
  emp["rotated_frequency"] = rotated.frequency_common;
  emp["rotated_ci95"] =
      ordered_json::array({rotated.ci_common.lo, rotated.ci_common.hi});
  emp["difference"] = rotated.frequency_common - aligned.frequency_common;
  emp["replicas"] = common.replicas;
  summary["empirical"] = emp;
  return {summary, ""};
}

RunResult run_percolate(const json& cfg) {
  auto d = static_cast<int>(get_int(cfg, "d", 1));
  Common common = parse_common(cfg, 10000);
  RngStream root = RngStream::root(common.seed);

  ordered_json summary;
  summary["command"] = "percolate";
  ordered_json config;
  config["d"] = d;
  config["seed"] = common.seed;
  summary["config"] = config;

  ordered_json theory = ordered_json::object();
  ordered_json emp = ordered_json::object();
  std::string csv;

  if (cfg.contains("survival")) {
    if (!cfg["survival"].is_array()) bad_field("survival", "must be an array");
    auto reps = static_cast<int>(get_int(cfg, "survival_replicas", common.replicas));
    ordered_json tlist = ordered_json::array();
    ordered_json elist = ordered_json::array();
    int idx = 0;
    for (const auto& entry : cfg["survival"]) {
      PercParams params;
      params.d = d;
      if (entry.contains("p"))
        params.s = -std::log2(entry["p"].get<double>());
      else
        params.s = get_num(entry, "s", 0, true);
      params.depth = static_cast<int>(get_int(entry, "depth", 20));
      double q = extinction_prob_oracle(params.p(), 1 << d);
      SurvivalStats st =
          survival_frequency(params, reps, root.derive(200 + static_cast<std::uint64_t>(idx)),
                             common.threads);
      ordered_json t;
      t["p"] = params.p();
      t["s"] = params.s;
      t["depth"] = params.depth;
      t["extinction_q"] = q;
      t["survival"] = 1 - q;
      t["survival_at_depth"] = 1 - extinction_prob_depth(params.p(), 1 << d, params.depth);
      tlist.push_back(t);
      ordered_json e;
      e["p"] = params.p();
      e["frequency"] = st.frequency;
      e["replicas"] = st.replicas;
      elist.push_back(e);
      ++idx;
    }
    theory["survival"] = tlist;
    emp["survival"] = elist;
  }

  if (cfg.contains("intersect")) {
    if (!cfg["intersect"].is_array()) bad_field("intersect", "must be an array");
    ordered_json tlist = ordered_json::array();
    ordered_json elist = ordered_json::array();
    int idx = 0;
    for (const auto& entry : cfg["intersect"]) {
      PercParams params;
      params.d = d;
      params.s = get_num(entry, "s", 0, true);
      params.depth = static_cast<int>(get_int(entry, "depth", 20));
      if (!entry.contains("target")) bad_field("intersect.target", "missing");
      TargetSet E = parse_target(entry["target"]);
      if (E.dim() != d) bad_field("intersect.target", "dimension mismatch");
      auto reps = static_cast<int>(get_int(entry, "replicas", common.replicas));
      OccupancyGrid e_grid = E.rasterize(params.depth);
      PercIntersectResult res = perc_intersect_dim(
          params, e_grid, reps, root.derive(300 + static_cast<std::uint64_t>(idx)),
          common.threads);
      ordered_json t;
      t["s"] = params.s;
      t["p"] = params.p();
      t["depth"] = params.depth;
      t["target"] = E.describe();
      t["dim_E"] = E.dim_h();
      if (E.dim_h() >= params.s)
        t["predicted_dim"] = E.dim_h() - params.s;
      else
        t["predicted"] = "avoid";
      tlist.push_back(t);
      ordered_json e;
      e["s"] = params.s;
      e["frequency_nonempty"] = res.frequency;
      e["frequency_ci95"] = ordered_json::array({res.ci.lo, res.ci.hi});
      e["nonempty"] = res.nonempty;
      e["replicas"] = res.replicas;
      if (res.nonempty > 0) {
        e["median_slope"] = res.median_slope;
        e["iqr"] = ordered_json::array({res.iqr_lo, res.iqr_hi});
      }
      elist.push_back(e);
      std::string part;
      dim_rows_csv(res.per_replica, &part);
      csv += part;
      ++idx;
    }
    theory["intersect"] = tlist;
    emp["intersect"] = elist;
  }

  summary["theory"] = theory;
  summary["empirical"] = emp;
  return {summary, csv};
}

}  // namespace

RunResult run_experiment(const std::string& cmd, const json& config) {
  if (cmd == "predict") return run_predict(config);
  if (cmd == "cover-dim") return run_cover_dim(config);
  if (cmd == "hit") return run_hit(config);
  if (cmd == "intersect-dim") return run_intersect_dim(config);
  if (cmd == "bad-case") return run_bad_case(config);
  if (cmd == "rotate") return run_rotate(config);
  if (cmd == "percolate") return run_percolate(config);
  throw config_error("unknown command '" + cmd + "'");
}

void write_reports(const RunResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/summary.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_dir + "/summary.json");
    f << result.summary.dump(2) << "\n";
  }
  if (!result.scales_csv.empty()) {
    std::ofstream f(out_dir + "/scales.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_dir + "/scales.csv");
    f << result.scales_csv;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"random covering set toolkit: closed-form predictions and seeded simulations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int replicas = -1;
  int threads = -1;

  const std::vector<std::string> commands = {"predict",   "cover-dim", "hit",
                                             "intersect-dim", "bad-case", "rotate",
                                             "percolate"};
  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--replicas", replicas, "replica count override");
    sub->add_option("--threads", threads, "worker thread count override");
    sub->add_option("--out", out_dir, "report output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::string cmd = app.get_subcommands().front()->get_name();
    json config;
    {
      std::ifstream f(config_path);
      if (!f) throw config_error("cannot open config file '" + config_path + "'");
      try {
        config = json::parse(f);
      } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
      }
    }
    if (config.contains("command") &&
        config["command"].get<std::string>() != cmd)
      throw config_error("config 'command' does not match the subcommand");
    if (seed >= 0) config["seed"] = seed;
    if (replicas >= 0) config["replicas"] = replicas;
    if (threads >= 0) config["threads"] = threads;
    if (!out_dir.empty()) config["out"] = out_dir;

    RunResult result = run_experiment(cmd, config);
    if (config.contains("out")) {
      write_reports(result, config["out"].get<std::string>());
    } else {
      std::cout << result.summary.dump(2) << "\n";
    }
    return 0;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const resource_limit_error& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const degenerate_outcome_error& e) {
    std::cerr << "degenerate outcome: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace covset
