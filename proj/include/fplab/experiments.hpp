#pragma once

// Experiment drivers shared by the CLI and the acceptance suite. Outputs are
// deterministic functions of (config, master_seed): replication i of row j
// draws from substream(derive_seed(seed, j), i), so results are bit-identical
// across worker counts and re-runs.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fplab/estimators.hpp"
#include "fplab/exact.hpp"
#include "fplab/version.hpp"
#include "fplab/walk.hpp"

namespace fplab {

using Json = nlohmann::ordered_json;

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Decouples row-level seeds from the per-replication substream derivation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return SplitMix64::mix(master ^ (0xD1B54A32D192ED03ull * (tag + 1)));
}

inline std::optional<std::uint64_t> default_step_cap(const BiasParams& bp) {
  if (bp.drift == 0.0) return 1000000000ull;  // heavy-tail regime at p = 1/2
  return std::nullopt;
}

namespace detail {

struct RunningStats {
  std::uint64_t n = 0;
  double mean = 0, m2 = 0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
    min = std::min(min, x);
    max = std::max(max, x);
  }
  double sd() const { return n > 1 ? std::sqrt(m2 / double(n - 1)) : 0.0; }
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 != 0 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace detail

struct SimulateSummary {
  double p = 0;
  int d = 1;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> step_cap;
  std::uint64_t capped_count = 0;
  // statistics over uncapped replications
  double mean_n = 0, sd_n = 0, min_n = 0, max_n = 0, median_n = 0;
  double mean_win_rate = 0, sd_win_rate = 0;
};

inline SimulateSummary run_simulate(const BiasParams& bp, Threshold d,
                                    std::uint64_t count, std::uint64_t seed,
                                    unsigned workers = 1,
                                    std::optional<std::uint64_t> cap =
                                        std::nullopt) {
  const auto samples = sample_batch(bp, d, count, seed, workers, cap);
  SimulateSummary s;
  s.p = bp.p;
  s.d = d.d;
  s.count = count;
  s.seed = seed;
  s.step_cap = cap;
  detail::RunningStats sn, sw;
  std::vector<double> ns;
  ns.reserve(samples.size());
  for (const auto& smp : samples) {
    if (smp.capped) {
      ++s.capped_count;
      continue;
    }
    sn.add(static_cast<double>(smp.n_steps));
    sw.add(win_rate(smp));
    ns.push_back(static_cast<double>(smp.n_steps));
  }
  s.mean_n = sn.mean;
  s.sd_n = sn.sd();
  s.min_n = sn.min;
  s.max_n = sn.max;
  s.median_n = detail::median_of(std::move(ns));
  s.mean_win_rate = sw.mean;
  s.sd_win_rate = sw.sd();
  return s;
}

struct EstimateSummary {
  EstimatorKind kind = EstimatorKind::pi;
  int k = 0;
  int d = 1;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::uint64_t capped_count = 0;
  double mean_estimate = 0, sd_estimate = 0, min_estimate = 0,
         max_estimate = 0;
  double max_abs_error = 0;  // max |estimate - target|
  double mean_n = 0, min_n = 0, max_n = 0, median_n = 0;
};

inline EstimateSummary run_estimate(const EstimatorSpec& spec,
                                    std::uint64_t count, std::uint64_t seed,
                                    unsigned workers = 1,
                                    std::optional<std::uint64_t> cap =
                                        std::nullopt) {
  const Threshold d(spec.d);
  const auto samples =
      sample_batch(spec.p_implied, d, count, seed, workers, cap);
  EstimateSummary s;
  s.kind = spec.kind;
  s.k = spec.k;
  s.d = spec.d;
  s.count = count;
  s.seed = seed;
  detail::RunningStats se, sn;
  std::vector<double> ns;
  ns.reserve(samples.size());
  for (const auto& smp : samples) {
    if (smp.capped) {
      ++s.capped_count;
      continue;
    }
    const double est = evaluate_estimator(spec, smp);
    se.add(est);
    s.max_abs_error = std::max(s.max_abs_error, std::abs(est - spec.target));
    sn.add(static_cast<double>(smp.n_steps));
    ns.push_back(static_cast<double>(smp.n_steps));
  }
  s.mean_estimate = se.mean;
  s.sd_estimate = se.sd();
  s.min_estimate = se.min;
  s.max_estimate = se.max;
  s.mean_n = sn.mean;
  s.min_n = sn.min;
  s.max_n = sn.max;
  s.median_n = detail::median_of(std::move(ns));
  return s;
}

// ---- Figure 1: ln(d Var[pi_hat_d]) and ln(d Var[pi_tilde_d]), exact ----

struct Figure1Row {
  int d = 1;
  double ln_d_var_hat = 0;
  double ln_d_var_tilde = 0;
  bool ok = true;
  std::string note;
};

inline std::vector<Figure1Row> figure1_rows(int d_max) {
  if (d_max < 1 || d_max % 2 == 0 || d_max > 201)
    throw std::invalid_argument(
        "figure1: d_max must be odd and <= 201 (the tilde variance leaves "
        "double range beyond that)");
  std::vector<Figure1Row> rows;
  rows.reserve((d_max + 1) / 2);
  for (int d = 1; d <= d_max; d += 2) {
    Figure1Row row;
    row.d = d;
    try {
      row.ln_d_var_hat = std::log(
          budget_normalized_variance(EstimatorKind::pi, 4, Threshold(d)));
      row.ln_d_var_tilde = std::log(
          budget_normalized_variance(EstimatorKind::pi, 6, Threshold(d)));
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

// ---- Figure 2: Monte Carlo bands and hitting-time medians ----

struct Figure2Row {
  std::string estimator;  // pi_hat (p = 1/2) or pi_tilde (p = 3/4)
  int d = 1;
  int m_requested = 0;
  int m_used = 0;  // uncapped replications
  int capped = 0;
  double ave = 0, sd = 0, band_lo = 0, band_hi = 0;
  double median_n = 0, max_n = 0;
};

inline std::vector<Figure2Row> figure2_rows(
    const std::vector<int>& d_list, int replications, std::uint64_t seed,
    unsigned workers = 1,
    std::optional<std::uint64_t> cap_fair = 1000000000ull) {
  if (replications < 2)
    throw std::invalid_argument("figure2: need at least 2 replications");
  std::vector<Figure2Row> rows;
  std::uint64_t row_tag = 0;
  for (const bool fair : {true, false}) {
    for (int d : d_list) {
      if (d % 2 == 0 || d < 1)
        throw std::invalid_argument("figure2: thresholds must be odd");
      const EstimatorSpec spec = estimator_coefficients(
          EstimatorKind::pi, fair ? 4 : 6, Threshold(d));
      const auto cap = fair ? cap_fair : std::nullopt;
      const EstimateSummary s =
          run_estimate(spec, replications, derive_seed(seed, row_tag),
                       workers, cap);
      Figure2Row row;
      row.estimator = fair ? "pi_hat" : "pi_tilde";
      row.d = d;
      row.m_requested = replications;
      row.m_used = static_cast<int>(replications - s.capped_count);
      row.capped = static_cast<int>(s.capped_count);
      row.ave = s.mean_estimate;
      row.sd = s.sd_estimate;
      row.band_lo = s.mean_estimate - 0.5 * s.sd_estimate;
      row.band_hi = s.mean_estimate + 0.5 * s.sd_estimate;
      row.median_n = s.median_n;
      row.max_n = s.max_n;
      rows.push_back(row);
      ++row_tag;
    }
  }
  return rows;
}

// ---- The d = 45 experiment from the pi approximation section ----

struct Pi45Summary {
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  double max_abs_error = 0;
  double min_n = 0, mean_n = 0, max_n = 0;
};

inline Pi45Summary run_pi45(std::uint64_t replications, std::uint64_t seed,
                            unsigned workers = 1) {
  const EstimatorSpec spec =
      estimator_coefficients(EstimatorKind::pi, 6, Threshold(45));
  const EstimateSummary s = run_estimate(spec, replications, seed, workers);
  Pi45Summary out;
  out.replications = replications;
  out.seed = seed;
  out.max_abs_error = s.max_abs_error;
  out.min_n = s.min_n;
  out.mean_n = s.mean_n;
  out.max_n = s.max_n;
  return out;
}

// ---- serialization ----

inline Json meta_json(const std::string& cmd, std::uint64_t seed) {
  Json meta;
  meta["tool"] = "fplab";
  meta["version"] = kVersion;
  meta["cmd"] = cmd;
  meta["seed"] = seed;
  return meta;
}

inline Json to_json(const MomentReport& r) {
  Json j;
  j["e_inv_n"] = r.e_inv_n;
  j["e_inv_n_sq"] = r.e_inv_n_sq;
  j["mean_win_rate"] = r.mean_win_rate;
  j["var_win_rate"] = r.var_win_rate;
  j["method"] = method_name(r.method);
  j["abs_error_estimate"] = r.abs_error_estimate;
  j["e_inv_n_err"] = r.e_inv_n_err;
  j["e_inv_n_sq_err"] = r.e_inv_n_sq_err;
  return j;
}

inline Json to_json(const EstimatorSpec& s) {
  Json j;
  j["kind"] = kind_name(s.kind);
  if (s.kind == EstimatorKind::pi) j["k"] = s.k;
  j["d"] = s.d;
  if (s.p_implied.p_exact)
    j["p_implied"] = s.p_implied.p_exact->str();
  else
    j["p_implied"] = s.p_implied.p;
  j["p_implied_double"] = s.p_implied.p;
  if (s.exact_coeffs) {
    j["scale_exact"] = s.scale_exact.str();
    j["offset_exact"] = s.offset_exact.str();
  } else {
    j["scale_exact"] = s.scale_big.str(45);
    j["offset_exact"] = s.offset_big.str(45);
  }
  j["scale"] = s.scale;
  j["offset"] = s.offset;
  j["target"] = s.target;
  return j;
}

inline Json to_json(const SimulateSummary& s) {
  Json j;
  j["p"] = s.p;
  j["d"] = s.d;
  j["count"] = s.count;
  j["seed"] = s.seed;
  if (s.step_cap) j["step_cap"] = *s.step_cap;
  j["capped_count"] = s.capped_count;
  j["mean_n"] = s.mean_n;
  j["sd_n"] = s.sd_n;
  j["min_n"] = s.min_n;
  j["max_n"] = s.max_n;
  j["median_n"] = s.median_n;
  j["mean_win_rate"] = s.mean_win_rate;
  j["sd_win_rate"] = s.sd_win_rate;
  return j;
}

inline Json to_json(const EstimateSummary& s) {
  Json j;
  j["kind"] = kind_name(s.kind);
  if (s.kind == EstimatorKind::pi) j["k"] = s.k;
  j["d"] = s.d;
  j["count"] = s.count;
  j["seed"] = s.seed;
  j["capped_count"] = s.capped_count;
  j["mean_estimate"] = s.mean_estimate;
  j["sd_estimate"] = s.sd_estimate;
  j["min_estimate"] = s.min_estimate;
  j["max_estimate"] = s.max_estimate;
  j["max_abs_error"] = s.max_abs_error;
  j["mean_n"] = s.mean_n;
  j["min_n"] = s.min_n;
  j["max_n"] = s.max_n;
  j["median_n"] = s.median_n;
  return j;
}

inline Json to_json(const PlanResult& p) {
  Json j;
  j["d_chosen"] = p.d_chosen;
  j["chebyshev_bound"] = p.chebyshev_bound;
  j["eps"] = p.eps;
  j["delta"] = p.delta;
  if (std::isinf(p.expected_cost))
    j["expected_cost"] = "infinite";
  else
    j["expected_cost"] = p.expected_cost;
  return j;
}

inline Json to_json(const Pi45Summary& s) {
  Json j;
  j["replications"] = s.replications;
  j["seed"] = s.seed;
  j["max_abs_error"] = s.max_abs_error;
  j["min_n"] = s.min_n;
  j["mean_n"] = s.mean_n;
  j["max_n"] = s.max_n;
  return j;
}

// CSV artifacts: UTF-8, LF line endings, 17 significant digits, stable
// header row, config echoed in leading comment lines.
inline void write_figure1_csv(const std::vector<Figure1Row>& rows, int d_max,
                              std::ostream& os) {
  os << "# fplab " << kVersion << " figure1 d_max=" << d_max << "\n";
  os << "d,ln_d_var_hat,ln_d_var_tilde\n";
  for (const auto& r : rows) {
    if (!r.ok) {
      os << r.d << ",error,error\n";
      continue;
    }
    os << r.d << ',' << fmt_g17(r.ln_d_var_hat) << ','
       << fmt_g17(r.ln_d_var_tilde) << "\n";
  }
}

inline void write_figure2_csv(const std::vector<Figure2Row>& rows,
                              std::uint64_t seed, int replications,
                              std::ostream& os) {
  os << "# fplab " << kVersion << " figure2 m=" << replications
     << " seed=" << seed << "\n";
  os << "estimator,d,m_requested,m_used,capped,ave,sd,band_lo,band_hi,"
        "median_n,max_n\n";
  for (const auto& r : rows) {
    os << r.estimator << ',' << r.d << ',' << r.m_requested << ','
       << r.m_used << ',' << r.capped << ',' << fmt_g17(r.ave) << ','
       << fmt_g17(r.sd) << ',' << fmt_g17(r.band_lo) << ','
       << fmt_g17(r.band_hi) << ',' << fmt_g17(r.median_n) << ','
       << fmt_g17(r.max_n) << "\n";
  }
}

// gnuplot companions for the CSV artifacts
inline void write_figure1_gnuplot(const std::string& csv_path,
                                  std::ostream& os) {
  os << "set datafile separator ','\n"
area  << "set xlabel 'd'\n";
}

}  // namespace fplab
