#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "alcs/metrics.hpp"
#include "alcs/rng.hpp"
#include "test_oracles.hpp"

using namespace alcs;

namespace {

TargetVector only_first(double v) { return {v, 0, 0, 0, 0, 0}; }

RunCurve constant_curve(int points, double value) {
  RunCurve c;
  for (int i = 0; i < points; ++i) {
    IterationMetrics m;
    m.labeled_size = 25 + i;
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      m.eps_rms[t] = value;
      m.eps_max[t] = value * 2;
      m.sigma_rms[t] = value / 2;
      m.sigma_max[t] = value;
    }
    c.push_back(m);
  }
  return c;
}

}  // namespace

TEST_CASE("compute_metrics: single case") {
  auto m = compute_metrics({only_first(0.496649)}, {only_first(0.0)},
                           {only_first(0.477585)}, 100);
  CHECK(std::fabs(m.eps_rms[0] - 0.019064) < 1e-9);
  CHECK(m.eps_max[0] == m.eps_rms[0]);
  CHECK(m.labeled_size == 100);
}

TEST_CASE("compute_metrics: exact predictions give zero error") {
  std::mt19937_64 rng(1);
  std::vector<TargetVector> rows(12);
  for (auto& r : rows)
    for (auto& v : r) v = standard_normal(rng);
  auto m = compute_metrics(rows, rows, rows, 25);
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    CHECK(m.eps_rms[t] == 0.0);
    CHECK(m.eps_max[t] == 0.0);
  }
}

TEST_CASE("compute_metrics: two-case RMS and max arithmetic") {
  std::vector<TargetVector> pred = {only_first(12.1212), only_first(49.4048)};
  std::vector<TargetVector> truth = {only_first(0.0), only_first(0.0)};
  std::vector<TargetVector> sig = {only_first(0.0), only_first(0.0)};
  auto m = compute_metrics(pred, sig, truth, 100);
  double want = std::sqrt((12.1212 * 12.1212 + 49.4048 * 49.4048) / 2.0);
  CHECK(m.eps_rms[0] == doctest::Approx(want).epsilon(1e-14));
  CHECK(m.eps_rms[0] == doctest::Approx(35.97052788381066).epsilon(1e-12));
  CHECK(m.eps_max[0] == 49.4048);
}

TEST_CASE("compute_metrics: definitional inequalities and permutation invariance") {
  std::mt19937_64 rng(2);
  std::vector<TargetVector> pred(30), truth(30), sig(30);
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      pred[i][t] = standard_normal(rng);
      truth[i][t] = standard_normal(rng);
      sig[i][t] = std::fabs(standard_normal(rng));
    }
  auto m = compute_metrics(pred, sig, truth, 50);
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    CHECK(m.eps_max[t] >= m.eps_rms[t]);
    CHECK(m.sigma_max[t] >= m.sigma_rms[t]);
    CHECK(m.eps_rms[t] >= 0.0);
    CHECK(m.sigma_rms[t] >= 0.0);
  }

  std::vector<TargetVector> pred2(pred.rbegin(), pred.rend());
  std::vector<TargetVector> truth2(truth.rbegin(), truth.rend());
  std::vector<TargetVector> sig2(sig.rbegin(), sig.rend());
  auto m2 = compute_metrics(pred2, sig2, truth2, 50);
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    CHECK(std::fabs(m.eps_rms[t] - m2.eps_rms[t]) < 1e-14);
    CHECK(m.eps_max[t] == m2.eps_max[t]);
  }
}

TEST_CASE("compute_metrics: near-zero on a pool contained in the training set") {
  // Interpolating models (zero jitter) evaluated where truth is known
  // exactly: every metric collapses to ~0.
  std::mt19937_64 rng(41);
  Matrix x = testref::well_separated_inputs(rng, 8, 3);
  std::vector<TargetVector> labels(8);
  for (auto& row : labels)
    for (auto& v : row) v = standard_normal(rng);

  std::vector<GpModel> models;
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    std::vector<double> y(8);
    for (std::size_t i = 0; i < 8; ++i) y[i] = labels[i][t];
    models.push_back(fit(TrainingSet(x, y), KernelHyper{1.0, 1.0, 0.0}));
  }

  std::vector<TargetVector> pred(5), sig(5), truth(5);
  for (std::size_t i = 0; i < 5; ++i) {  // U = first five training points
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      Prediction p = predict(models[t], x.row_span(i));
      pred[i][t] = p.mean;
      sig[i][t] = p.std;
      truth[i][t] = labels[i][t];
    }
  }
  auto m = compute_metrics(pred, sig, truth, 8);
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    CHECK(m.eps_max[t] < 1e-5);
    CHECK(m.sigma_max[t] < 1e-5);
  }
}

TEST_CASE("compute_metrics: input validation") {
  CHECK_THROWS_AS(compute_metrics({}, {}, {}, 1), input_error);
  CHECK_THROWS_AS(compute_metrics({only_first(1)}, {only_first(0)}, {}, 1), input_error);
}

TEST_CASE("percent_error") {
  CHECK(percent_error(0.477585, 0.496649) == doctest::Approx(3.9917501596574487).epsilon(1e-12));
  CHECK(percent_error(-3743.67, -3755.80) == doctest::Approx(0.3240136016262146).epsilon(1e-12));
  CHECK(percent_error(2.5, 2.5) == 0.0);
  CHECK_THROWS_AS(percent_error(0.0, 1.0), domain_error);
}

TEST_CASE("student_t_quantile against reference values") {
  CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.706204736).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 2) == doctest::Approx(4.302652730).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.228138852).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 32) == doctest::Approx(2.036933343).epsilon(1e-8));
  CHECK(student_t_quantile(0.5, 7) == 0.0);
  CHECK(student_t_quantile(0.025, 9) == doctest::Approx(-student_t_quantile(0.975, 9)));
  CHECK_THROWS_AS(student_t_quantile(0.975, 0), input_error);
  CHECK_THROWS_AS(student_t_quantile(1.0, 5), input_error);
}

TEST_CASE("aggregate: identical runs collapse to a zero-width band") {
  std::vector<RunCurve> runs(5, constant_curve(4, 0.3));
  auto rows = aggregate(runs);
  CHECK(rows.size() == 4 * kTargetCount * 4);
  for (const auto& r : rows) {
    CHECK(r.lower == doctest::Approx(r.mean));
    CHECK(r.upper == doctest::Approx(r.mean));
    CHECK(r.runs == 5);
  }
}

TEST_CASE("aggregate: two runs use the df=1 t quantile") {
  std::vector<RunCurve> runs = {constant_curve(1, 0.2), constant_curve(1, 0.6)};
  auto rows = aggregate(runs);
  // eps_rms values {0.2, 0.6}: mean 0.4, half-width t * s / sqrt(2) with
  // s = |b-a|/sqrt(2), so hw = 12.7062... * 0.2.
  const auto& r = rows.front();
  CHECK(r.metric == MetricKind::EpsRms);
  CHECK(r.mean == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.upper - r.mean == doctest::Approx(12.706204736 * 0.2).epsilon(1e-6));
}

TEST_CASE("aggregate: 33 iid standard normals give the expected half-width") {
  std::mt19937_64 rng(99);
  std::vector<RunCurve> runs;
  for (int r = 0; r < 33; ++r) {
    RunCurve c = constant_curve(1, 0.0);
    for (std::size_t t = 0; t < kTargetCount; ++t) c[0].eps_rms[t] = standard_normal(rng);
    runs.push_back(c);
  }
  auto rows = aggregate(runs);
  // Expected ~ t_{.975,32}/sqrt(33) = 0.3546 when the sample std is ~1.
  const auto& r = rows.front();
  double hw = 0.5 * (r.upper - r.lower);
  CHECK(hw > 0.2);
  CHECK(hw < 0.5);
}

TEST_CASE("aggregate: input validation") {
  CHECK_THROWS_AS(aggregate({constant_curve(3, 0.1)}), input_error);
  std::vector<RunCurve> runs = {constant_curve(3, 0.1), constant_curve(2, 0.1)};
  CHECK_THROWS_AS(aggregate(runs), input_error);
  std::vector<RunCurve> shifted = {constant_curve(3, 0.1), constant_curve(3, 0.1)};
  shifted[1][1].labeled_size = 99;
  CHECK_THROWS_AS(aggregate(shifted), input_error);
}

TEST_CASE("check_bounds: extreme constants") {
  RunCurve c = constant_curve(10, 0.5);  // eps_rms .5, sigma_rms .25, eps_max 1, sigma_max .5
  BoundReport loose = check_bounds(c, 1e6, 1e6);
  CHECK(loose.overall_frac_rms == 1.0);
  CHECK(loose.overall_frac_max == 1.0);
  BoundReport tight = check_bounds(c, 0.0, 1.0);
  CHECK(tight.overall_frac_rms == 0.0);  // 0.5 > 0.25 + 0
  CHECK(tight.overall_frac_max == 0.0);  // 1.0 > 1.0 * 0.5
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    CHECK(loose.frac_max[t] == 1.0);
    CHECK(tight.frac_max[t] == 0.0);
  }
  BoundReport mid = check_bounds(c, 0.3, 2.0);
  CHECK(mid.overall_frac_rms == 1.0);  // 0.5 <= 0.25 + 0.3
  CHECK(mid.overall_frac_max == 1.0);  // 1.0 <= 2 * 0.5
  CHECK(mid.overall_frac_both == 1.0);
}

TEST_CASE("compare_strategies: identical inputs give zero differences") {
  std::vector<RunCurve> a = {constant_curve(3, 0.4), constant_curve(3, 0.2)};
  auto rows = compare_strategies(a, a);
  for (const auto& r : rows) {
    CHECK(r.diff_mean == 0.0);
    CHECK(r.lower == 0.0);
    CHECK(r.upper == 0.0);
  }
}

TEST_CASE("compare_strategies: positive paired difference with a tight CI") {
  std::mt19937_64 rng(7);
  std::vector<RunCurve> active, random;
  for (int r = 0; r < 10; ++r) {
    double noise = 0.01 * standard_normal(rng);
    active.push_back(constant_curve(2, 0.2 + noise));
    random.push_back(constant_curve(2, 0.5 + noise));  // paired: same noise
  }
  auto rows = compare_strategies(active, random);
  for (const auto& r : rows) {
    if (r.metric != MetricKind::EpsRms) continue;
    CHECK(r.diff_mean == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(r.lower > 0.29);
    CHECK(r.pairs == 10);
  }
}

TEST_CASE("compare_strategies: unpaired runs are rejected") {
  std::vector<RunCurve> a = {constant_curve(3, 0.4)};
  std::vector<RunCurve> b = {constant_curve(3, 0.4), constant_curve(3, 0.4)};
  CHECK_THROWS_AS(compare_strategies(a, b), input_error);
}
