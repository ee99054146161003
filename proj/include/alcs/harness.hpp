// Experiment harness: resolves an ExperimentSpec into a pool and a set of
// label tables, executes the (strategy x seed x configuration) run matrix
// on a bounded worker pool, and writes the CSV artifacts plus a manifest
// with per-file checksums. Outputs are deterministic: a re-run with an
// identical spec reproduces byte-identical CSV bodies regardless of the
// worker count or completion order.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "alcs/csv.hpp"
#include "alcs/encode.hpp"
#include "alcs/errors.hpp"
#include "alcs/learner.hpp"
#include "alcs/metrics.hpp"
#include "alcs/oracle.hpp"
#include "alcs/rng.hpp"
#include "alcs/version.hpp"

namespace alcs {

// ------------------------------------------------------------- pool I/O ---

// Pre-encoded pool: case_id, f0..f32 (raw features, normalization is
// refitted on load).
inline constexpr const char* kFeatureCsvPrefix = "f";

struct LoadedPool {
  std::vector<int> ids;
  Matrix raw_features;  // as encoded, before pool normalization
  NormalizationStats normalization;
  Pool pool;            // normalized features, ready for the learner

  void finalize() {
    normalization = fit_pool_normalization(raw_features);
    pool.ids = ids;
    pool.features = apply_normalization(normalization, raw_features);
    pool.validate();
  }
};

inline std::string feature_csv(const std::vector<int>& ids, const Matrix& raw) {
  std::string body = "case_id";
  for (std::size_t j = 0; j < raw.cols; ++j)
    body += "," + std::string(kFeatureCsvPrefix) + std::to_string(j);
  body += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    body += std::to_string(ids[i]);
    for (std::size_t j = 0; j < raw.cols; ++j) body += "," + format_double(raw(i, j));
    body += "\n";
  }
  return body;
}

inline LoadedPool load_feature_pool(const std::string& path) {
  CsvTable t = read_csv(path);
  int id_col = t.column("case_id");
  if (id_col < 0) throw parse_error(path, 1, "missing column case_id");
  std::vector<int> cols;
  for (std::size_t j = 0;; ++j) {
    int c = t.column(std::string(kFeatureCsvPrefix) + std::to_string(j));
    if (c < 0) break;
    cols.push_back(c);
  }
  if (cols.size() != kFeatureCount)
    throw parse_error(path, 1,
                      "expected " + std::to_string(kFeatureCount) + " feature columns, got " +
                          std::to_string(cols.size()));
  if (t.rows.empty()) throw input_error("feature pool is empty: " + path);

  LoadedPool lp;
  lp.raw_features = Matrix(t.rows.size(), kFeatureCount);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    lp.ids.push_back(static_cast<int>(parse_long(t, r, id_col)));
    for (std::size_t j = 0; j < kFeatureCount; ++j)
      lp.raw_features(r, j) = parse_double(t, r, cols[j]);
  }
  lp.finalize();
  return lp;
}

namespace detail {

inline double parse_angle(const CsvTable& t, std::size_t row, int col) {
  const std::string& angle = t.rows[row][static_cast<std::size_t>(col)];
  try {
    return compass_to_degrees(angle);
  } catch (const input_error&) {
    return parse_double(t, row, col);
  }
}

}  // namespace detail

// Raw loading-case input, two layouts:
//
//  * pooled files: a currents CSV `case_id, depth_m, speed_ms, angle_deg`
//    (one row per node, nodes in depth order within each case) and a waves
//    CSV `case_id, height_m, period_s, azimuth_deg, alpha, gamma[, sigma]`;
//  * per-case files: `currents_path` and `waves_path` name directories
//    holding one `<case_id>.csv` per case, currents with columns
//    `depth_m, speed_ms, angle_deg` and waves with a single row of
//    `height_m, period_s, azimuth_deg, alpha, gamma[, sigma]`.
//
// The angle column accepts degrees or a compass point. All cases must share
// one depth grid.
inline LoadedPool load_raw_pool(const std::string& currents_path,
                                const std::string& waves_path) {
  std::map<int, CurrentProfile> profiles;
  std::vector<int> order;  // first-appearance order of case ids

  if (std::filesystem::is_directory(currents_path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(currents_path))
      if (entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      int id = 0;
      try {
        id = std::stoi(file.stem().string());
      } catch (const std::exception&) {
        throw input_error("current file name must be <case_id>.csv: " + file.string());
      }
      CsvTable cur = read_csv(file.string());
      int c_d = cur.column("depth_m"), c_s = cur.column("speed_ms"),
          c_a = cur.column("angle_deg");
      if (c_d < 0 || c_s < 0 || c_a < 0)
        throw parse_error(file.string(), 1, "need columns depth_m, speed_ms, angle_deg");
      CurrentProfile p;
      for (std::size_t r = 0; r < cur.rows.size(); ++r)
        p.nodes.push_back({parse_double(cur, r, c_d), parse_double(cur, r, c_s),
                           detail::parse_angle(cur, r, c_a)});
      profiles.emplace(id, std::move(p));
      order.push_back(id);
    }
  } else {
    CsvTable cur = read_csv(currents_path);
    int c_id = cur.column("case_id"), c_d = cur.column("depth_m"),
        c_s = cur.column("speed_ms"), c_a = cur.column("angle_deg");
    if (c_id < 0 || c_d < 0 || c_s < 0 || c_a < 0)
      throw parse_error(currents_path, 1,
                        "need columns case_id, depth_m, speed_ms, angle_deg");
    for (std::size_t r = 0; r < cur.rows.size(); ++r) {
      int id = static_cast<int>(parse_long(cur, r, c_id));
      CurrentNode node;
      node.depth_m = parse_double(cur, r, c_d);
      node.speed_ms = parse_double(cur, r, c_s);
      node.angle_deg = detail::parse_angle(cur, r, c_a);
      auto [it, fresh] = profiles.try_emplace(id);
      if (fresh) order.push_back(id);
      it->second.nodes.push_back(node);
    }
  }
  if (profiles.empty()) throw input_error("no current data in " + currents_path);

  const CurrentProfile& first = profiles.begin()->second;
  for (const auto& [id, p] : profiles) {
    p.validate();
    for (std::size_t i = 0; i < p.nodes.size(); ++i)
      if (p.nodes[i].depth_m != first.nodes[i].depth_m)
        throw input_error("current case " + std::to_string(id) +
                          " uses a different depth grid than the pool");
  }

  std::map<int, WaveSpec> waves;
  auto parse_wave_row = [](const CsvTable& wav, std::size_t r) {
    int w_h = wav.column("height_m"), w_p = wav.column("period_s"),
        w_az = wav.column("azimuth_deg"), w_al = wav.column("alpha"),
        w_g = wav.column("gamma");
    int w_sig = wav.column("sigma");  // optional
    if (w_h < 0 || w_p < 0 || w_az < 0 || w_al < 0 || w_g < 0)
      throw parse_error(wav.path, 1,
                        "need columns height_m, period_s, azimuth_deg, alpha, gamma");
    WaveSpec w;
    w.height_m = parse_double(wav, r, w_h);
    w.period_s = parse_double(wav, r, w_p);
    w.azimuth_deg = parse_double(wav, r, w_az);
    w.alpha = parse_double(wav, r, w_al);
    w.gamma = parse_double(wav, r, w_g);
    if (w_sig >= 0) w.sigma = parse_double(wav, r, w_sig);
    return w;
  };
  if (std::filesystem::is_directory(waves_path)) {
    for (const auto& entry : std::filesystem::directory_iterator(waves_path)) {
      if (entry.path().extension() != ".csv") continue;
      int id = 0;
      try {
        id = std::stoi(entry.path().stem().string());
      } catch (const std::exception&) {
        throw input_error("wave file name must be <case_id>.csv: " + entry.path().string());
      }
      CsvTable wav = read_csv(entry.path().string());
      if (wav.rows.size() != 1)
        throw parse_error(entry.path().string(), 1, "expected exactly one wave row");
      waves.emplace(id, parse_wave_row(wav, 0));
    }
  } else {
    CsvTable wav = read_csv(waves_path);
    int w_id = wav.column("case_id");
    if (w_id < 0) throw parse_error(waves_path, 1, "missing column case_id");
    for (std::size_t r = 0; r < wav.rows.size(); ++r) {
      int id = static_cast<int>(parse_long(wav, r, w_id));
      if (!waves.emplace(id, parse_wave_row(wav, r)).second)
        throw parse_error(waves_path, static_cast<long>(r) + 2,
                          "duplicate case id " + std::to_string(id));
    }
  }

  LoadedPool lp;
  lp.raw_features = Matrix(order.size(), kFeatureCount);
  for (std::size_t r = 0; r < order.size(); ++r) {
    int id = order[r];
    auto wit = waves.find(id);
    if (wit == waves.end())
      throw input_error("case " + std::to_string(id) + " has a current but no wave");
    auto x = assemble_features(profiles.at(id), wit->second);
    for (std::size_t j = 0; j < kFeatureCount; ++j) lp.raw_features(r, j) = x[j];
    lp.ids.push_back(id);
  }
  if (waves.size() != order.size())
    throw input_error("waves file lists cases missing from the currents file");
  lp.finalize();
  return lp;
}

// Deterministic synthetic pool: latent-factor feature cloud. Latent vectors
// z ~ N(0, I_q) (q = 5) are mapped through a fixed random 33 x q matrix with
// N(0, 1/q) entries, plus iid N(0, 0.05^2) noise per component. Draw order
// per mt19937_64(seed): the map column-major (33*q normals), then per case
// q latent normals followed by 33 noise normals.
inline LoadedPool make_synthetic_pool(std::size_t count, std::uint64_t seed,
                                      std::size_t latent_dim = 5) {
  if (count == 0) throw input_error("make_synthetic_pool: count must be positive");
  std::mt19937_64 rng(seed);
  const std::size_t d = kFeatureCount;
  Matrix map(d, latent_dim);
  const double col_scale = 1.0 / std::sqrt(static_cast<double>(latent_dim));
  for (std::size_t k = 0; k < latent_dim; ++k)
    for (std::size_t j = 0; j < d; ++j) map(j, k) = col_scale * standard_normal(rng);

  LoadedPool lp;
  lp.raw_features = Matrix(count, d);
  std::vector<double> z(latent_dim);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& v : z) v = standard_normal(rng);
    for (std::size_t j = 0; j < d; ++j) {
      double x = 0.0;
      for (std::size_t k = 0; k < latent_dim; ++k) x += map(j, k) * z[k];
      lp.raw_features(i, j) = x + 0.05 * standard_normal(rng);
    }
    lp.ids.push_back(static_cast<int>(i));
  }
  lp.finalize();
  return lp;
}

// ------------------------------------------------------------------ spec ---

struct ExperimentSpec {
  // Pool source: exactly one of the three.
  std::string features_csv;
  std::string currents_csv, waves_csv;
  std::size_t synthetic_pool_size = 0;
  std::uint64_t synthetic_pool_seed = 0;

  // Oracle source: labeled tables (one per configuration) or synthetic
  // configurations identified by seed.
  std::vector<std::string> target_csvs;
  std::vector<std::uint64_t> config_seeds;

  std::vector<QueryStrategy> strategies;
  std::vector<std::uint64_t> seeds;
  int initial_labeled = 25;
  int budget = 325;
  HyperBounds bounds;
  int restarts = 3;
  std::string out_dir;
  int jobs = 1;

  void validate() const {
    int pool_sources = !features_csv.empty();
    pool_sources += !currents_csv.empty() || !waves_csv.empty();
    pool_sources += synthetic_pool_size > 0;
    if (pool_sources != 1)
      throw input_error("ExperimentSpec: exactly one pool source must be given");
    if ((currents_csv.empty()) != (waves_csv.empty()))
      throw input_error("ExperimentSpec: currents and waves files go together");
    if (target_csvs.empty() == config_seeds.empty())
      throw input_error("ExperimentSpec: give either target tables or synthetic config seeds");
    if (strategies.empty()) throw input_error("ExperimentSpec: at least one strategy");
    if (seeds.empty()) throw input_error("ExperimentSpec: at least one seed");
    if (out_dir.empty()) throw input_error("ExperimentSpec: output directory required");
    if (jobs < 1) throw input_error("ExperimentSpec: jobs must be >= 1");
  }
};

// ------------------------------------------------------------- run matrix ---

struct RunKey {
  std::string strategy;
  std::size_t config = 0;  // index into the configuration list
  std::uint64_t seed = 0;

  std::string label() const {
    return "run_" + strategy + "_c" + std::to_string(config) + "_s" + std::to_string(seed);
  }
};

struct RunOutput {
  RunKey key;
  QueryStrategy strategy;
  std::vector<IterationRecord> records;
  bool failed = false;
  std::string error;
};

inline std::string run_csv(const std::vector<IterationRecord>& records) {
  std::string body = "n,target,eps_rms,eps_max,sigma_rms,sigma_max\n";
  for (const auto& rec : records) {
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      body += std::to_string(rec.labeled_size);
      body += ",";
      body += std::string(kTargetNames[t]);
      body += "," + format_double(rec.metrics.eps_rms[t]);
      body += "," + format_double(rec.metrics.eps_max[t]);
      body += "," + format_double(rec.metrics.sigma_rms[t]);
      body += "," + format_double(rec.metrics.sigma_max[t]);
      body += "\n";
    }
  }
  return body;
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string body = "n,target,metric,mean,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    body += std::to_string(r.n);
    body += ",";
    body += std::string(kTargetNames[r.target]);
    body += ",";
    body += std::string(kMetricNames[static_cast<std::size_t>(r.metric)]);
    body += "," + format_double(r.mean) + "," + format_double(r.lower) + "," +
            format_double(r.upper) + "\n";
  }
  return body;
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string body = "n,target,metric,diff_mean,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    body += std::to_string(r.n);
    body += ",";
    body += std::string(kTargetNames[r.target]);
    body += ",";
    body += std::string(kMetricNames[static_cast<std::size_t>(r.metric)]);
    body += "," + format_double(r.diff_mean) + "," + format_double(r.lower) + "," +
            format_double(r.upper) + "\n";
  }
  return body;
}

struct MatrixResult {
  int exit_code = 0;  // 0 ok, 1 input error, 2 run failure
  std::vector<RunOutput> runs;
  std::string manifest_path;
};

// Loads the pool described by an experiment spec.
inline LoadedPool load_pool(const ExperimentSpec& spec) {
  if (!spec.features_csv.empty()) return load_feature_pool(spec.features_csv);
  if (!spec.currents_csv.empty()) return load_raw_pool(spec.currents_csv, spec.waves_csv);
  return make_synthetic_pool(spec.synthetic_pool_size, spec.synthetic_pool_seed);
}

// Executes the full run matrix and writes per-run CSVs, per-strategy
// aggregate CSVs, active-vs-random comparison CSVs and manifest.txt under
// spec.out_dir.
inline MatrixResult run_matrix(const ExperimentSpec& spec) {
  spec.validate();
  LoadedPool lp = load_pool(spec);

  // Resolve every configuration to a label table covering the pool.
  std::vector<LabeledTable> tables;
  std::vector<std::string> config_names;
  if (!spec.target_csvs.empty()) {
    for (const auto& path : spec.target_csvs) {
      tables.push_back(read_labeled_table(path));
      config_names.push_back(path);
      for (int id : lp.ids)
        if (!tables.back().contains(id))
          throw input_error("table " + path + " misses case id " + std::to_string(id));
    }
  } else {
    for (std::uint64_t cs : spec.config_seeds) {
      SyntheticOracle oracle(cs, lp.pool.features.cols);
      tables.push_back(tabulate_synthetic(oracle, lp.ids, lp.pool.features));
      config_names.push_back("synthetic:" + std::to_string(cs));
    }
  }

  std::filesystem::create_directories(spec.out_dir);

  std::vector<RunOutput> runs;
  for (const auto& strategy : spec.strategies)
    for (std::size_t c = 0; c < tables.size(); ++c)
      for (std::uint64_t seed : spec.seeds)
        runs.push_back({RunKey{strategy.name(), c, seed}, strategy, {}, false, ""});

  // Bounded worker pool; each run is independent.
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      RunOutput& out = runs[i];
      try {
        LoopConfig cfg;
        cfg.initial_labeled = spec.initial_labeled;
        cfg.budget = spec.budget;
        cfg.strategy = out.strategy;
        cfg.seed = out.key.seed;
        cfg.bounds = spec.bounds;
        cfg.restarts = spec.restarts;
        out.records = run(lp.pool, cfg, tables[out.key.config]);
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
      }
    }
  };
  {
    std::vector<std::thread> threads;
    const int n_threads = std::min<int>(spec.jobs, static_cast<int>(runs.size()));
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  // Emit artifacts in a fixed order, independent of completion order.
  MatrixResult result;
  std::string manifest;
  manifest += "schema_version=" + std::string(kSchemaVersion) + "\n";
  manifest += "tool_version=" + std::string(kVersion) + "\n";
  manifest += "pool_size=" + std::to_string(lp.pool.size()) + "\n";
  manifest += "n0=" + std::to_string(spec.initial_labeled) + "\n";
  manifest += "budget=" + std::to_string(spec.budget) + "\n";
  {
    std::string s;
    for (const auto& strat : spec.strategies) s += (s.empty() ? "" : " ") + strat.name();
    manifest += "strategies=" + s + "\n";
    s.clear();
    for (auto seed : spec.seeds) s += (s.empty() ? "" : " ") + std::to_string(seed);
    manifest += "seeds=" + s + "\n";
  }
  for (std::size_t c = 0; c < config_names.size(); ++c)
    manifest += "config_" + std::to_string(c) + "=" + config_names[c] + "\n";

  bool any_failed = false;
  for (const auto& out : runs) {
    std::string name = out.key.label() + ".csv";
    if (out.failed) {
      any_failed = true;
      manifest += name + ".status=failed: " + out.error + "\n";
      continue;
    }
    std::string body = run_csv(out.records);
    write_file((std::filesystem::path(spec.out_dir) / name).string(), body);
    manifest += name + ".status=ok\n";
    manifest += name + ".fnv1a=" + fnv1a_hex(body) + "\n";
  }

  if (!any_failed) {
    // Per-strategy aggregates (pooled over configurations and seeds).
    std::map<std::string, std::vector<RunCurve>> by_strategy;
    for (const auto& out : runs) {
      RunCurve curve;
      for (const auto& rec : out.records) curve.push_back(rec.metrics);
      by_strategy[out.key.strategy].push_back(std::move(curve));
    }
    for (const auto& [name, curves] : by_strategy) {
      if (curves.size() < 2) continue;
      std::string body = aggregate_csv(aggregate(curves));
      std::string fname = "agg_" + name + ".csv";
      write_file((std::filesystem::path(spec.out_dir) / fname).string(), body);
      manifest += fname + ".fnv1a=" + fnv1a_hex(body) + "\n";
    }
    // Paired comparisons against the random baseline, matched by
    // (configuration, seed); run ordering within a strategy is identical by
    // construction.
    if (by_strategy.count("random")) {
      for (const auto& [name, curves] : by_strategy) {
        if (name == "random") continue;
        std::string body = comparison_csv(compare_strategies(curves, by_strategy["random"]));
        std::string fname = "compare_" + name + "_vs_random.csv";
        write_file((std::filesystem::path(spec.out_dir) / fname).string(), body);
        manifest += fname + ".fnv1a=" + fnv1a_hex(body) + "\n";
      }
    }
  }

  result.manifest_path = (std::filesystem::path(spec.out_dir) / "manifest.txt").string();
  write_file(result.manifest_path, manifest);
  result.runs = std::move(runs);
  result.exit_code = any_failed ? 2 : 0;
  return result;
}

}  // namespace alcs
