// Command-line entry point.
//
//   alcs run     execute a (strategy x seed x configuration) experiment
//                matrix and write per-run, aggregate, comparison CSVs and a
//                manifest under --out
//   alcs encode  encode raw current/wave tables into a feature CSV
//
// Exit codes: 0 success, 1 input error, 2 run failure.
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "alcs/alcs.hpp"

namespace {

int run_command(const alcs::ExperimentSpec& spec) {
  alcs::MatrixResult result = alcs::run_matrix(spec);
  int ok = 0, failed = 0;
  for (const auto& r : result.runs) (r.failed ? failed : ok)++;
  std::printf("%d run(s) completed, %d failed; manifest: %s\n", ok, failed,
              result.manifest_path.c_str());
  for (const auto& r : result.runs)
    if (r.failed) std::fprintf(stderr, "failed %s: %s\n", r.key.label().c_str(), r.error.c_str());
  return result.exit_code;
}

int encode_command(const std::string& currents, const std::string& waves,
                   const std::string& out) {
  alcs::LoadedPool pool = alcs::load_raw_pool(currents, waves);
  alcs::write_file(out, alcs::feature_csv(pool.ids, pool.raw_features));
  std::printf("encoded %zu cases (%zu features) -> %s\n", pool.ids.size(),
              pool.raw_features.cols, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pool-based active learning for simulation portfolios"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "Execute an experiment matrix");
  std::string pool_arg, oracle_kind = "synthetic";
  std::vector<std::string> strategy_args{"joint"};
  std::vector<std::string> target_csvs;
  std::vector<std::uint64_t> config_seeds;
  std::vector<std::uint64_t> seeds{0};
  alcs::ExperimentSpec spec;
  run->add_option("--pool", pool_arg,
                  "Pool source: features CSV, 'raw:<currents.csv>:<waves.csv>' or "
                  "'synthetic:<count>:<seed>'")
      ->required();
  run->add_option("--oracle", oracle_kind, "Label source: 'table' or 'synthetic'")
      ->check(CLI::IsMember({"table", "synthetic"}));
  run->add_option("--targets", target_csvs,
                  "Labeled-table CSV, one per riser configuration (oracle=table)");
  run->add_option("--config-seeds", config_seeds,
                  "Synthetic configuration seeds (oracle=synthetic)");
  run->add_option("--strategy", strategy_args,
                  "Query strategy: joint, random or single:<target>; repeatable");
  run->add_option("--seeds", seeds, "Run seeds for the initial sample");
  run->add_option("--n0", spec.initial_labeled, "Initial labeled size")
      ->capture_default_str();
  run->add_option("--budget", spec.budget, "Final labeled size")->capture_default_str();
  run->add_option("--restarts", spec.restarts, "Hyperparameter search restarts")
      ->capture_default_str();
  run->add_option("--out", spec.out_dir, "Output directory")->required();
  spec.jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (spec.jobs < 1) spec.jobs = 1;
  run->add_option("--jobs", spec.jobs, "Concurrent runs")->capture_default_str();

  // --- encode ---
  auto* encode = app.add_subcommand("encode", "Encode raw loading cases to features");
  std::string currents, waves, encode_out;
  encode->add_option("--currents", currents, "Current profiles CSV")->required();
  encode->add_option("--waves", waves, "Wave parameters CSV")->required();
  encode->add_option("--out", encode_out, "Feature CSV to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(encode)) return encode_command(currents, waves, encode_out);

    // Resolve the pool argument.
    if (pool_arg.rfind("synthetic:", 0) == 0) {
      std::string rest = pool_arg.substr(10);
      auto colon = rest.find(':');
      spec.synthetic_pool_size = std::stoul(rest.substr(0, colon));
      spec.synthetic_pool_seed =
          colon == std::string::npos ? 0 : std::stoull(rest.substr(colon + 1));
    } else if (pool_arg.rfind("raw:", 0) == 0) {
      std::string rest = pool_arg.substr(4);
      auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw alcs::input_error("--pool raw:<currents.csv>:<waves.csv>");
      spec.currents_csv = rest.substr(0, colon);
      spec.waves_csv = rest.substr(colon + 1);
    } else {
      spec.features_csv = pool_arg;
    }

    if (oracle_kind == "table") {
      spec.target_csvs = target_csvs;
      if (spec.target_csvs.empty())
        throw alcs::input_error("--oracle table requires --targets");
    } else {
      spec.config_seeds = config_seeds.empty() ? std::vector<std::uint64_t>{0} : config_seeds;
    }
    for (const auto& s : strategy_args)
      spec.strategies.push_back(alcs::QueryStrategy::parse(s));
    spec.seeds = seeds;

    return run_command(spec);
  } catch (const alcs::numerical_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
