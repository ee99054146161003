// Deviation measures over the unlabeled pool and their aggregation across
// runs: per-iteration RMS/max errors and implied standard deviations (all in
// original target units), Student-t confidence bands, affine error-bound
// diagnostics and paired active-vs-random comparisons.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "alcs/errors.hpp"
#include "alcs/stats.hpp"
#include "alcs/targets.hpp"

namespace alcs {

// Metrics describing the model trained on `labeled_size` points, evaluated
// over the unlabeled pool. All values are in original target units.
struct IterationMetrics {
  int labeled_size = 0;
  std::array<double, kTargetCount> eps_rms{};
  std::array<double, kTargetCount> eps_max{};
  std::array<double, kTargetCount> sigma_rms{};
  std::array<double, kTargetCount> sigma_max{};
};

enum class MetricKind : std::size_t { EpsRms = 0, EpsMax = 1, SigmaRms = 2, SigmaMax = 3 };

inline constexpr std::array<std::string_view, 4> kMetricNames = {"eps_rms", "eps_max",
                                                                 "sigma_rms", "sigma_max"};

inline double metric_value(const IterationMetrics& m, std::size_t target, MetricKind kind) {
  switch (kind) {
    case MetricKind::EpsRms: return m.eps_rms[target];
    case MetricKind::EpsMax: return m.eps_max[target];
    case MetricKind::SigmaRms: return m.sigma_rms[target];
    default: return m.sigma_max[target];
  }
}

// Errors and implied uncertainties over the unlabeled pool. `predictions`
// and `stds` must already be in original units; `truths` holds the exact
// values for the same cases in the same order.
inline IterationMetrics compute_metrics(const std::vector<TargetVector>& predictions,
                                        const std::vector<TargetVector>& stds,
                                        const std::vector<TargetVector>& truths,
                                        int labeled_size) {
  if (predictions.empty()) throw input_error("compute_metrics: empty pool");
  if (predictions.size() != truths.size() || predictions.size() != stds.size())
    throw input_error("compute_metrics: size mismatch");
  IterationMetrics m;
  m.labeled_size = labeled_size;
  const double inv_n = 1.0 / static_cast<double>(predictions.size());
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    double err_sq = 0.0, err_max = 0.0, sig_sq = 0.0, sig_max = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      double e = std::fabs(predictions[i][t] - truths[i][t]);
      err_sq += e * e;
      if (e > err_max) err_max = e;
      double s = stds[i][t];
      sig_sq += s * s;
      if (s > sig_max) sig_max = s;
    }
    m.eps_rms[t] = std::sqrt(err_sq * inv_n);
    m.eps_max[t] = err_max;
    m.sigma_rms[t] = std::sqrt(sig_sq * inv_n);
    m.sigma_max[t] = sig_max;
  }
  return m;
}

// 100 |predicted - exact| / |exact|.
inline double percent_error(double exact, double predicted) {
  if (exact == 0.0) throw domain_error("percent_error: exact value is zero");
  return 100.0 * std::fabs(predicted - exact) / std::fabs(exact);
}

// ----------------------------------------------------------- aggregation ---

struct AggregateRow {
  int n = 0;
  std::size_t target = 0;
  MetricKind metric = MetricKind::EpsRms;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t runs = 0;
};

using RunCurve = std::vector<IterationMetrics>;

namespace detail {

inline void require_aligned(const std::vector<RunCurve>& runs) {
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].size() != runs[0].size())
      throw input_error("runs have different lengths");
    for (std::size_t i = 0; i < runs[r].size(); ++i)
      if (runs[r][i].labeled_size != runs[0][i].labeled_size)
        throw input_error("runs have misaligned n grids");
  }
}

}  // namespace detail

// Mean and 95% Student-t confidence band per (n, target, metric) over runs.
inline std::vector<AggregateRow> aggregate(const std::vector<RunCurve>& runs,
                                           double level = 0.95) {
  if (runs.size() < 2) throw input_error("aggregate: need at least 2 runs");
  detail::require_aligned(runs);
  std::vector<AggregateRow> out;
  std::vector<double> values(runs.size());
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      for (std::size_t k = 0; k < 4; ++k) {
        auto kind = static_cast<MetricKind>(k);
        for (std::size_t r = 0; r < runs.size(); ++r)
          values[r] = metric_value(runs[r][i], t, kind);
        ConfidenceInterval ci = t_confidence_interval(values, level);
        out.push_back({runs[0][i].labeled_size, t, kind, ci.mean, ci.lower, ci.upper,
                       runs.size()});
      }
    }
  }
  return out;
}

// -------------------------------------------------------- bound checking ---

// Fractions of iterations satisfying the affine bounds
//   eps_rms <= sigma_rms + sigma0   and   eps_max <= k_mult * sigma_max.
struct BoundReport {
  double sigma0 = 0.0;
  double k_mult = 1.0;
  std::array<double, kTargetCount> frac_rms{};
  std::array<double, kTargetCount> frac_max{};
  std::array<double, kTargetCount> frac_both{};
  double overall_frac_rms = 0.0;
  double overall_frac_max = 0.0;
  double overall_frac_both = 0.0;
};

inline BoundReport check_bounds(std::span<const IterationMetrics> curve, double sigma0,
                                double k_mult) {
  if (curve.empty()) throw input_error("check_bounds: empty curve");
  BoundReport rep;
  rep.sigma0 = sigma0;
  rep.k_mult = k_mult;
  std::size_t all_rms = 0, all_max = 0, all_both = 0;
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    std::size_t n_rms = 0, n_max = 0, n_both = 0;
    for (const auto& m : curve) {
      bool ok_rms = m.eps_rms[t] <= m.sigma_rms[t] + sigma0;
      bool ok_max = m.eps_max[t] <= k_mult * m.sigma_max[t];
      n_rms += ok_rms;
      n_max += ok_max;
      n_both += ok_rms && ok_max;
    }
    const double inv = 1.0 / static_cast<double>(curve.size());
    rep.frac_rms[t] = n_rms * inv;
    rep.frac_max[t] = n_max * inv;
    rep.frac_both[t] = n_both * inv;
    all_rms += n_rms;
    all_max += n_max;
    all_both += n_both;
  }
  const double inv_all = 1.0 / static_cast<double>(curve.size() * kTargetCount);
  rep.overall_frac_rms = all_rms * inv_all;
  rep.overall_frac_max = all_max * inv_all;
  rep.overall_frac_both = all_both * inv_all;
  return rep;
}

// ------------------------------------------------------------ comparison ---

struct ComparisonRow {
  int n = 0;
  std::size_t target = 0;
  MetricKind metric = MetricKind::EpsRms;
  double diff_mean = 0.0;  // random - active; positive favors active
  double lower = 0.0;
  double upper = 0.0;
  std::size_t pairs = 0;
};

// Paired per-n differences (random minus active) with 95% CIs. Run i of
// `active` must share its seed (and so its initial sample) with run i of
// `random`.
inline std::vector<ComparisonRow> compare_strategies(const std::vector<RunCurve>& active,
                                                     const std::vector<RunCurve>& random,
                                                     double level = 0.95) {
  if (active.size() != random.size() || active.empty())
    throw input_error("compare_strategies: run lists must pair up");
  std::vector<RunCurve> all(active);
  all.insert(all.end(), random.begin(), random.end());
  detail::require_aligned(all);
  std::vector<ComparisonRow> out;
  std::vector<double> diffs(active.size());
  for (std::size_t i = 0; i < active[0].size(); ++i) {
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      for (std::size_t k = 0; k < 4; ++k) {
        auto kind = static_cast<MetricKind>(k);
        for (std::size_t r = 0; r < active.size(); ++r)
          diffs[r] = metric_value(random[r][i], t, kind) - metric_value(active[r][i], t, kind);
        ConfidenceInterval ci = t_confidence_interval(diffs, level);
        out.push_back({active[0][i].labeled_size, t, kind, ci.mean, ci.lower, ci.upper,
                       active.size()});
      }
    }
  }
  return out;
}

}  // namespace alcs
