// Pool-based active-learning loop: seed an initial labeled set, train one
// Gaussian-process model per target on the labeled cases, score every
// unlabeled case, query the oracle for the most informative one, repeat.
//
// Query strategies:
//   single:<target>  argmax of the predicted standard deviation of one
//                    target (in original units);
//   joint            argmax of the geometric mean of all six predicted
//                    standard deviations (each in its model's normalized
//                    label scale), computed as a mean of logs;
//   random           uniform draw without replacement (the volume-effect
//                    baseline).
//
// Ties break toward the smallest case id. A full run is a pure function of
// (pool, config, label table); per-iteration metrics are recorded before
// the queried case moves, so metrics at size n always describe the model
// trained on n points.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "alcs/encode.hpp"
#include "alcs/errors.hpp"
#include "alcs/gp.hpp"
#include "alcs/metrics.hpp"
#include "alcs/oracle.hpp"
#include "alcs/rng.hpp"
#include "alcs/targets.hpp"

namespace alcs {

struct Pool {
  std::vector<int> ids;  // case id per row of `features`
  Matrix features;       // encoded and pool-normalized

  void validate() const {
    if (ids.empty() || ids.size() != features.rows)
      throw input_error("Pool: ids and feature rows must match and be non-empty");
    std::map<int, int> seen;
    for (int id : ids)
      if (++seen[id] > 1) throw input_error("Pool: duplicate case id " + std::to_string(id));
  }

  std::size_t size() const { return ids.size(); }
};

struct QueryStrategy {
  enum class Kind { SingleTarget, JointGeometricMean, Random };
  Kind kind = Kind::JointGeometricMean;
  std::size_t target = 0;  // only for SingleTarget

  static QueryStrategy single(std::size_t target) {
    if (target >= kTargetCount) throw input_error("QueryStrategy: target index out of range");
    return {Kind::SingleTarget, target};
  }
  static QueryStrategy joint() { return {Kind::JointGeometricMean, 0}; }
  static QueryStrategy random() { return {Kind::Random, 0}; }

  std::string name() const {
    switch (kind) {
      case Kind::SingleTarget: return "single_" + std::string(kTargetNames[target]);
      case Kind::JointGeometricMean: return "joint";
      default: return "random";
    }
  }

  // Accepts "joint", "random", "single:<index>" or "single:<target name>".
  static QueryStrategy parse(const std::string& text) {
    if (text == "joint") return joint();
    if (text == "random") return random();
    if (text.rfind("single:", 0) == 0) {
      std::string arg = text.substr(7);
      for (std::size_t t = 0; t < kTargetCount; ++t)
        if (arg == kTargetNames[t]) return single(t);
      try {
        std::size_t pos = 0;
        int idx = std::stoi(arg, &pos);
        if (pos == arg.size() && idx >= 0 && idx < static_cast<int>(kTargetCount))
          return single(static_cast<std::size_t>(idx));
      } catch (const std::exception&) {
      }
      throw input_error("QueryStrategy: unknown target '" + arg + "'");
    }
    throw input_error("QueryStrategy: cannot parse '" + text + "'");
  }
};

struct LoopConfig {
  int initial_labeled = 25;  // n0
  int budget = 325;          // final labeled size
  QueryStrategy strategy = QueryStrategy::joint();
  std::uint64_t seed = 0;
  HyperBounds bounds;
  int restarts = 3;

  void validate(std::size_t pool_size) const {
    if (initial_labeled < 1) throw input_error("LoopConfig: n0 must be >= 1");
    if (budget <= initial_labeled) throw input_error("LoopConfig: budget must exceed n0");
    if (static_cast<std::size_t>(budget) > pool_size)
      throw input_error("LoopConfig: budget exceeds pool size");
    if (restarts < 1) throw input_error("LoopConfig: restarts must be >= 1");
    bounds.validate();
  }
};

// Labeled/unlabeled split of the pool. Row indices refer to pool.features;
// unlabeled rows are kept sorted by case id, labeled rows in acquisition
// order. The two sets always partition the pool.
struct PoolState {
  std::vector<std::size_t> labeled_rows;
  std::vector<TargetVector> labeled_y;
  std::vector<std::size_t> unlabeled_rows;
  int iteration = 0;
  std::uint64_t seed = 0;
};

// Seed streams derived from LoopConfig::seed.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kSelectStream = 1;
inline constexpr std::uint64_t kHyperStream = 2;

// Draws the initial labeled set uniformly without replacement (over case
// ids in ascending order, so the draw is independent of pool file order)
// and labels it from `table`.
inline PoolState init_state(const Pool& pool, const LoopConfig& cfg,
                            const LabeledTable& table) {
  pool.validate();
  cfg.validate(pool.size());

  std::vector<std::size_t> by_id(pool.size());
  for (std::size_t i = 0; i < by_id.size(); ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return pool.ids[a] < pool.ids[b]; });

  std::mt19937_64 rng(derive_seed(cfg.seed, kInitStream));
  auto picks = sample_without_replacement(rng, pool.size(),
                                          static_cast<std::size_t>(cfg.initial_labeled));

  PoolState st;
  st.seed = cfg.seed;
  std::vector<bool> taken(pool.size(), false);
  for (std::size_t p : picks) {
    std::size_t row = by_id[p];
    taken[p] = true;
    st.labeled_rows.push_back(row);
    st.labeled_y.push_back(table.lookup(pool.ids[row]));
  }
  for (std::size_t p = 0; p < pool.size(); ++p)
    if (!taken[p]) st.unlabeled_rows.push_back(by_id[p]);
  return st;
}

struct TargetModel {
  GpModel gp;
  double offset = 0.0;  // label transform: y_model = (y - offset) / scale
  double scale = 1.0;
};

struct TrainedModels {
  std::array<TargetModel, kTargetCount> per_target;
  TargetNormalization norm;
};

using WarmLengths = std::array<std::optional<double>, kTargetCount>;

// Fits the six per-target models on the current labeled set. Target
// normalization is refitted from scratch on the labeled rows, and each
// target's hyperparameters are re-optimized (optionally warm-started from
// the previous iteration's optimum). The searches share one distance matrix
// and one correlation-factor cache across targets.
inline TrainedModels train_models(const Pool& pool, const PoolState& state,
                                  const LoopConfig& cfg, const WarmLengths& warm = {}) {
  if (state.labeled_rows.size() < 2)
    throw input_error("train_models: need at least 2 labeled cases");

  Matrix x(state.labeled_rows.size(), pool.features.cols);
  for (std::size_t i = 0; i < state.labeled_rows.size(); ++i)
    std::copy_n(pool.features.row(state.labeled_rows[i]), pool.features.cols, x.row(i));
  Matrix sq_dists = pairwise_squared_distances(x);

  TrainedModels out;
  out.norm = fit_target_normalization(state.labeled_y);

  std::vector<std::vector<double>> ys(kTargetCount,
                                      std::vector<double>(state.labeled_y.size()));
  for (std::size_t t = 0; t < kTargetCount; ++t)
    for (std::size_t i = 0; i < state.labeled_y.size(); ++i)
      ys[t][i] = out.norm.normalize(t, state.labeled_y[i][t]);

  HyperSearchOptions opt;
  opt.bounds = cfg.bounds;
  opt.restarts = cfg.restarts;
  opt.seed = derive_seed(derive_seed(cfg.seed, kHyperStream),
                         static_cast<std::uint64_t>(state.iteration));
  std::vector<std::optional<double>> warm_lengths(warm.begin(), warm.end());
  SharedHyperResult found = optimize_hyper_shared(sq_dists, ys, opt, warm_lengths);

  for (std::size_t t = 0; t < kTargetCount; ++t) {
    TrainingSet ts(x, std::move(ys[t]));
    out.per_target[t].gp = fit_from_factor(ts, found.hyper[t], found.factor[t]);
    out.per_target[t].offset = out.norm.offset[t];
    out.per_target[t].scale = out.norm.scale[t];
  }
  return out;
}

// Predictions over the unlabeled rows: means and stds in original units,
// plus stds in each model's own label scale (used by the joint criterion).
struct PoolPredictions {
  std::vector<TargetVector> mean;       // original units
  std::vector<TargetVector> std;        // original units
  std::vector<TargetVector> std_model;  // normalized label scale
};

inline PoolPredictions predict_unlabeled(const Pool& pool, const PoolState& state,
                                         const TrainedModels& models) {
  Matrix queries(state.unlabeled_rows.size(), pool.features.cols);
  for (std::size_t i = 0; i < state.unlabeled_rows.size(); ++i)
    std::copy_n(pool.features.row(state.unlabeled_rows[i]), pool.features.cols,
                queries.row(i));

  // Query-to-training distances are shared by all six models.
  const Matrix& train = models.per_target[0].gp.train_inputs;
  Matrix cross(queries.rows, train.rows);
  for (std::size_t q = 0; q < queries.rows; ++q)
    for (std::size_t i = 0; i < train.rows; ++i)
      cross(q, i) = squared_distance(queries.row_span(q), train.row_span(i));

  PoolPredictions out;
  out.mean.resize(queries.rows);
  out.std.resize(queries.rows);
  out.std_model.resize(queries.rows);
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    const TargetModel& tm = models.per_target[t];
    auto preds = predict_batch(tm.gp, queries, &cross);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      out.mean[i][t] = preds[i].mean * tm.scale + tm.offset;
      out.std[i][t] = preds[i].std * tm.scale;
      out.std_model[i][t] = preds[i].std;
    }
  }
  return out;
}

// Selection core: argmax of the strategy's score over candidate sigma rows,
// ties broken toward the smallest case id. `rng` is only consulted by the
// random strategy. Throws state_error when `ids` is empty.
inline int select_from_sigmas(const std::vector<int>& ids,
                              const std::vector<TargetVector>& sigmas,
                              const QueryStrategy& strategy, std::mt19937_64* rng) {
  if (ids.empty()) throw state_error("select_from_sigmas: unlabeled pool is empty");
  if (strategy.kind == QueryStrategy::Kind::Random) {
    if (rng == nullptr) throw input_error("select_from_sigmas: random strategy needs an rng");
    return ids[uniform_below(*rng, ids.size())];
  }
  if (sigmas.size() != ids.size())
    throw input_error("select_from_sigmas: ids and sigma rows must match");

  auto score = [&](std::size_t i) {
    if (strategy.kind == QueryStrategy::Kind::SingleTarget)
      return sigmas[i][strategy.target];
    double s = 0.0;  // sum of logs; same argmax as the geometric mean
    for (std::size_t t = 0; t < kTargetCount; ++t) s += std::log(sigmas[i][t]);
    return s;
  };

  std::size_t best = 0;
  double best_score = score(0);
  for (std::size_t i = 1; i < ids.size(); ++i) {
    double s = score(i);
    if (s > best_score || (s == best_score && ids[i] < ids[best])) {
      best = i;
      best_score = s;
    }
  }
  return ids[best];
}

// Scores the unlabeled pool under `strategy` and returns the case id to
// query next. Single-target scores are in original units; the joint score
// uses normalized-scale sigmas so tensions cannot drown utilization factors.
inline int select_query(const PoolPredictions& preds, const Pool& pool,
                        const PoolState& state, const QueryStrategy& strategy,
                        std::mt19937_64& rng) {
  std::vector<int> ids(state.unlabeled_rows.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = pool.ids[state.unlabeled_rows[i]];
  const auto& sigmas = strategy.kind == QueryStrategy::Kind::SingleTarget ? preds.std
                                                                          : preds.std_model;
  return select_from_sigmas(ids, sigmas, strategy, &rng);
}

struct IterationRecord {
  int labeled_size = 0;  // size of the labeled set the metrics describe
  int selected_id = -1;
  IterationMetrics metrics;
};

// One loop iteration: train, measure over the unlabeled pool, select, label,
// move. Metrics are taken before the move.
inline IterationRecord step(const Pool& pool, PoolState& state, const LoopConfig& cfg,
                            const LabeledTable& table, std::mt19937_64& select_rng,
                            WarmLengths* warm = nullptr) {
  if (state.unlabeled_rows.empty()) throw state_error("step: unlabeled pool is empty");

  TrainedModels models = train_models(pool, state, cfg, warm ? *warm : WarmLengths{});
  PoolPredictions preds = predict_unlabeled(pool, state, models);

  std::vector<TargetVector> truths(state.unlabeled_rows.size());
  for (std::size_t i = 0; i < truths.size(); ++i)
    truths[i] = table.lookup(pool.ids[state.unlabeled_rows[i]]);

  IterationRecord rec;
  rec.labeled_size = static_cast<int>(state.labeled_rows.size());
  rec.metrics = compute_metrics(preds.mean, preds.std, truths, rec.labeled_size);
  rec.selected_id = select_query(preds, pool, state, cfg.strategy, select_rng);

  // Move the queried case from unlabeled to labeled.
  std::size_t pos = 0;
  while (pool.ids[state.unlabeled_rows[pos]] != rec.selected_id) ++pos;
  std::size_t row = state.unlabeled_rows[pos];
  state.unlabeled_rows.erase(state.unlabeled_rows.begin() +
                             static_cast<std::ptrdiff_t>(pos));
  state.labeled_rows.push_back(row);
  state.labeled_y.push_back(table.lookup(rec.selected_id));
  ++state.iteration;

  if (warm)
    for (std::size_t t = 0; t < kTargetCount; ++t)
      (*warm)[t] = models.per_target[t].gp.hyper.length_scale;
  return rec;
}

// Runs the loop from n0 to the budget; exactly budget - n0 records.
// `table` must label every pool case (metrics need ground truth over the
// unlabeled set).
inline std::vector<IterationRecord> run(const Pool& pool, const LoopConfig& cfg,
                                        const LabeledTable& table) {
  PoolState state = init_state(pool, cfg, table);
  std::mt19937_64 select_rng(derive_seed(cfg.seed, kSelectStream));
  WarmLengths warm{};
  std::vector<IterationRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.budget - cfg.initial_labeled));
  while (static_cast<int>(state.labeled_rows.size()) < cfg.budget)
    records.push_back(step(pool, state, cfg, table, select_rng, &warm));
  return records;
}

}  // namespace alcs
