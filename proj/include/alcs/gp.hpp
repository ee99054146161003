// Exact Gaussian-process regression with an isotropic Gaussian kernel
//
//   k(a, b) = c^2 exp(-|a-b|^2 / (2 l^2))
//
// and zero prior mean. Training factorizes K + jitter*I with a Cholesky
// decomposition; prediction gives the posterior mean and standard deviation
//
//   mu(x)     = k(x,X) (K + jitter*I)^{-1} y
//   sigma(x)^2 = k(x,x) - k(x,X) (K + jitter*I)^{-1} k(X,x)
//
// Hyperparameters (c, l) are chosen by maximizing the log marginal
// likelihood with a multi-start coordinate search in log space; the
// amplitude coordinate is solved in closed form (see optimize_hyper).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alcs/errors.hpp"
#include "alcs/linalg.hpp"
#include "alcs/rng.hpp"

namespace alcs {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

// Relative jitter applied by default: jitter = 1e-10 * c^2. Small enough to
// be invisible next to the tolerances used anywhere in the pipeline, large
// enough to keep K positive definite on clustered inputs.
inline constexpr double kRelativeJitter = 1e-10;

struct KernelHyper {
  double amplitude = 1.0;     // c, kernel_eval(x,x) = c^2
  double length_scale = 1.0;  // l, isotropic
  double jitter = 0.0;        // added to the diagonal of K

  void validate() const {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw input_error("KernelHyper: amplitude must be positive");
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
      throw input_error("KernelHyper: length_scale must be positive");
    if (!(jitter >= 0.0) || !std::isfinite(jitter))
      throw input_error("KernelHyper: jitter must be non-negative");
  }
};

inline double default_jitter(double amplitude) {
  return kRelativeJitter * amplitude * amplitude;
}

struct TrainingSet {
  Matrix inputs;               // one row per observation
  std::vector<double> targets;

  TrainingSet() = default;
  TrainingSet(Matrix x, std::vector<double> y) : inputs(std::move(x)), targets(std::move(y)) {
    validate();
  }
  TrainingSet(const std::vector<std::vector<double>>& x, std::vector<double> y) {
    if (x.empty()) throw input_error("TrainingSet: empty inputs");
    inputs = Matrix(x.size(), x.front().size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].size() != inputs.cols)
        throw input_error("TrainingSet: inconsistent input dimensions");
      for (std::size_t j = 0; j < inputs.cols; ++j) inputs(i, j) = x[i][j];
    }
    targets = std::move(y);
    validate();
  }

  std::size_t size() const { return inputs.rows; }
  std::size_t dim() const { return inputs.cols; }

  void validate() const {
    if (inputs.rows == 0) throw input_error("TrainingSet: empty inputs");
    if (inputs.rows != targets.size())
      throw input_error("TrainingSet: |X| != |y|");
  }
};

inline double kernel_eval(std::span<const double> a, std::span<const double> b,
                          const KernelHyper& h) {
  h.validate();
  if (a.size() != b.size()) throw input_error("kernel_eval: dimension mismatch");
  double d2 = squared_distance(a, b);
  return h.amplitude * h.amplitude *
         std::exp(-d2 / (2.0 * h.length_scale * h.length_scale));
}

// Trained posterior. Immutable after fit(); safe to share across threads.
struct GpModel {
  KernelHyper hyper;           // jitter reflects the value that factorized
  Matrix train_inputs;
  Matrix chol;                 // lower factor of K + jitter*I
  std::vector<double> weights; // (K + jitter*I)^{-1} y

  std::size_t size() const { return train_inputs.rows; }
  std::size_t dim() const { return train_inputs.cols; }
};

struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

namespace detail {

inline Matrix kernel_matrix(const Matrix& sq_dists, const KernelHyper& h) {
  const double c2 = h.amplitude * h.amplitude;
  const double inv = -1.0 / (2.0 * h.length_scale * h.length_scale);
  Matrix k(sq_dists.rows, sq_dists.cols);
  for (std::size_t i = 0; i < k.data.size(); ++i)
    k.data[i] = c2 * std::exp(sq_dists.data[i] * inv);
  return k;
}

}  // namespace detail

// Fits the model for fixed hyperparameters. If the factorization hits a
// non-positive pivot the jitter is escalated by 10x for up to three retries
// before a numerical_error (carrying the failing pivot index) is thrown.
// `shared_sq_dists`, when given, must be the pairwise squared distances of
// ts.inputs; it lets callers reuse one distance matrix across many fits.
inline GpModel fit(const TrainingSet& ts, KernelHyper h,
                   const Matrix* shared_sq_dists = nullptr) {
  ts.validate();
  h.validate();
  const std::size_t n = ts.size();
  Matrix d2 = shared_sq_dists ? *shared_sq_dists : pairwise_squared_distances(ts.inputs);

  int last_pivot = -1;
  double jitter = h.jitter;
  for (int attempt = 0; attempt <= 3; ++attempt, jitter *= 10.0) {
    Matrix k = detail::kernel_matrix(d2, h);
    for (std::size_t i = 0; i < n; ++i) k(i, i) += jitter;
    int pivot = cholesky_in_place(k);
    if (pivot < 0) {
      GpModel m;
      m.hyper = h;
      m.hyper.jitter = jitter;
      m.train_inputs = ts.inputs;
      m.chol = std::move(k);
      m.weights = cholesky_solve(m.chol, ts.targets);
      return m;
    }
    last_pivot = pivot;
  }
  throw numerical_error(
      "fit: covariance not positive definite after jitter escalation (pivot " +
          std::to_string(last_pivot) + ")",
      last_pivot);
}

inline Prediction predict(const GpModel& m, std::span<const double> x) {
  if (x.size() != m.dim()) throw input_error("predict: dimension mismatch");
  const std::size_t n = m.size();
  const double c2 = m.hyper.amplitude * m.hyper.amplitude;
  const double inv = -1.0 / (2.0 * m.hyper.length_scale * m.hyper.length_scale);
  std::vector<double> kvec(n);
  for (std::size_t i = 0; i < n; ++i)
    kvec[i] = c2 * std::exp(squared_distance(x, m.train_inputs.row_span(i)) * inv);

  Prediction p;
  p.mean = dot(kvec, m.weights);
  solve_lower(m.chol, kvec);  // kvec becomes L^{-1} k(X,x)
  double var = c2 - dot(kvec, kvec);
  p.std = var > 0.0 ? std::sqrt(var) : 0.0;
  return p;
}

// `cross_sq_dists`, when given, holds |queries_q - X_i|^2 at (q, i) and
// saves recomputing distances for every model sharing the same geometry.
inline std::vector<Prediction> predict_batch(const GpModel& m, const Matrix& queries,
                                             const Matrix* cross_sq_dists = nullptr) {
  if (queries.cols != m.dim()) throw input_error("predict_batch: dimension mismatch");
  std::vector<Prediction> out(queries.rows);
  const std::size_t n = m.size();
  const double c2 = m.hyper.amplitude * m.hyper.amplitude;
  const double inv = -1.0 / (2.0 * m.hyper.length_scale * m.hyper.length_scale);
  std::vector<double> kvec(n);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    if (cross_sq_dists) {
      const double* d = cross_sq_dists->row(q);
      for (std::size_t i = 0; i < n; ++i) kvec[i] = c2 * std::exp(d[i] * inv);
    } else {
      auto x = queries.row_span(q);
      for (std::size_t i = 0; i < n; ++i)
        kvec[i] = c2 * std::exp(squared_distance(x, m.train_inputs.row_span(i)) * inv);
    }
    out[q].mean = dot(kvec, m.weights);
    solve_lower(m.chol, kvec);
    double var = c2 - dot(kvec, kvec);
    out[q].std = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return out;
}

// log p(y | X, hyper) = -1/2 y^T (K+jI)^{-1} y - sum_i log L_ii - n/2 log(2 pi).
// `y` must be the targets the model was fitted on.
inline double log_marginal_likelihood(const GpModel& m, std::span<const double> y) {
  if (y.size() != m.size()) throw input_error("log_marginal_likelihood: size mismatch");
  double quad = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) quad += y[i] * m.weights[i];
  double logdet_half = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) logdet_half += std::log(m.chol(i, i));
  return -0.5 * quad - logdet_half - 0.5 * static_cast<double>(m.size()) * kLogTwoPi;
}

struct HyperBounds {
  double amplitude_lo = 1e-2;
  double amplitude_hi = 1e3;
  double length_lo = 1e-2;
  double length_hi = 1e3;

  void validate() const {
    if (!(amplitude_lo > 0.0 && amplitude_hi >= amplitude_lo))
      throw input_error("HyperBounds: bad amplitude bounds");
    if (!(length_lo > 0.0 && length_hi >= length_lo))
      throw input_error("HyperBounds: bad length bounds");
    if (!std::isfinite(amplitude_hi) || !std::isfinite(length_hi))
      throw input_error("HyperBounds: bounds must be finite");
  }
};

struct HyperSearchOptions {
  HyperBounds bounds;
  int restarts = 3;
  std::uint64_t seed = 0;
  std::optional<double> warm_length;  // extra start at the previous optimum
  int refine_iters = 14;              // golden-section steps per start
};

namespace detail {

// The profiled likelihood machinery. With jitter tied to the amplitude
// (jitter = kRelativeJitter * c^2) the covariance is
//
//   K + jI = c^2 (E + kRelativeJitter*I)
//
// where the correlation matrix E depends only on the length scale. A single
// Cholesky of E therefore scores a candidate length scale against any
// target vector, and the optimum over c is closed-form:
//
//   c*^2 = y^T (E + kRelativeJitter*I)^{-1} y / n
//
// clamped to the amplitude bounds.
struct CorrelationFactor {
  Matrix chol;              // lower factor of E + kRelativeJitter*I
  double logdet_half = 0.0; // sum of log diagonal entries
  bool ok = false;
};

inline CorrelationFactor factor_length_scale(const Matrix& sq_dists, double length_scale) {
  const std::size_t n = sq_dists.rows;
  const double inv = -1.0 / (2.0 * length_scale * length_scale);
  CorrelationFactor f;
  f.chol = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) f.chol(i, j) = std::exp(sq_dists(i, j) * inv);
    f.chol(i, i) = 1.0 + kRelativeJitter;
  }
  if (cholesky_in_place(f.chol) >= 0) return f;
  for (std::size_t i = 0; i < n; ++i) f.logdet_half += std::log(f.chol(i, i));
  f.ok = true;
  return f;
}

struct ProfiledEval {
  double lml = -std::numeric_limits<double>::infinity();
  double amplitude = 0.0;
  bool ok = false;
};

inline ProfiledEval profiled_score(const CorrelationFactor& f, std::span<const double> y,
                                   const HyperBounds& b) {
  if (!f.ok) return {};
  const std::size_t n = y.size();
  std::vector<double> u(y.begin(), y.end());
  solve_lower(f.chol, u);  // u = L^{-1} y, so alpha = |u|^2
  double alpha = dot(u, u);

  double c = alpha > 0.0 ? std::sqrt(alpha / static_cast<double>(n)) : 0.0;
  c = std::min(std::max(c, b.amplitude_lo), b.amplitude_hi);

  ProfiledEval ev;
  ev.ok = true;
  ev.amplitude = c;
  ev.lml = -0.5 * alpha / (c * c) - static_cast<double>(n) * std::log(c) - f.logdet_half -
           0.5 * static_cast<double>(n) * kLogTwoPi;
  return ev;
}

inline ProfiledEval profiled_lml(const Matrix& sq_dists, std::span<const double> y,
                                 double length_scale, const HyperBounds& b) {
  return profiled_score(factor_length_scale(sq_dists, length_scale), y, b);
}

}  // namespace detail

// Maximizes the log marginal likelihood over (amplitude, length scale)
// within `bounds`. Multi-start: the warm start (if any), the midpoint of the
// log length range, and restarts-1 seeded uniform draws in log space; each
// start is refined by golden section in a +-2 log-units window. Start lists
// are prefixes of each other across increasing `restarts`, so the best
// likelihood found is non-decreasing in the restart count for a fixed seed.
inline KernelHyper optimize_hyper(const TrainingSet& ts, const HyperSearchOptions& opt,
                                  const Matrix* shared_sq_dists = nullptr) {
  ts.validate();
  opt.bounds.validate();
  if (opt.restarts < 1) throw input_error("optimize_hyper: restarts must be >= 1");

  Matrix d2 = shared_sq_dists ? Matrix{} : pairwise_squared_distances(ts.inputs);
  const Matrix& dist = shared_sq_dists ? *shared_sq_dists : d2;

  const double t_lo = std::log(opt.bounds.length_lo);
  const double t_hi = std::log(opt.bounds.length_hi);

  std::vector<double> starts;
  if (opt.warm_length)
    starts.push_back(std::min(std::max(std::log(*opt.warm_length), t_lo), t_hi));
  starts.push_back(0.5 * (t_lo + t_hi));
  std::mt19937_64 rng(opt.seed);
  for (int r = 1; r < opt.restarts; ++r)
    starts.push_back(t_lo + (t_hi - t_lo) * uniform01(rng));

  double best_lml = -std::numeric_limits<double>::infinity();
  double best_t = starts.front();
  double best_c = opt.bounds.amplitude_lo;
  bool any_ok = false;

  auto eval = [&](double t) {
    auto ev = detail::profiled_lml(dist, ts.targets, std::exp(t), opt.bounds);
    if (ev.ok) {
      any_ok = true;
      if (ev.lml > best_lml) {
        best_lml = ev.lml;
        best_t = t;
        best_c = ev.amplitude;
      }
    }
    return ev.ok ? ev.lml : -std::numeric_limits<double>::infinity();
  };

  const double golden = 0.6180339887498949;
  for (double start : starts) {
    double a = std::max(t_lo, start - 2.0);
    double b = std::min(t_hi, start + 2.0);
    eval(start);
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < opt.refine_iters; ++it) {
      if (f1 < f2) {  // maximizing: drop the left part
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = eval(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = eval(x1);
      }
    }
  }

  if (!any_ok)
    throw numerical_error("optimize_hyper: likelihood evaluation failed at every start", -1);

  KernelHyper h;
  h.amplitude = best_c;
  h.length_scale = std::exp(best_t);
  h.jitter = default_jitter(best_c);
  return h;
}

// Builds a model directly from a cached correlation factor: with
// jitter = kRelativeJitter * c^2 the covariance factor is just c * chol(E).
// The factor must come from factor_length_scale(sq_dists of ts.inputs,
// h.length_scale).
inline GpModel fit_from_factor(const TrainingSet& ts, const KernelHyper& h,
                               const detail::CorrelationFactor& factor) {
  GpModel m;
  m.hyper = h;
  m.hyper.jitter = default_jitter(h.amplitude);
  m.train_inputs = ts.inputs;
  m.chol = factor.chol;
  for (auto& v : m.chol.data) v *= h.amplitude;
  m.weights = cholesky_solve(m.chol, ts.targets);
  return m;
}

// Number of shared coarse-grid candidates in the batched search below.
inline constexpr int kSharedGridPoints = 17;

struct SharedHyperResult {
  std::vector<KernelHyper> hyper;              // one per target row
  std::vector<detail::CorrelationFactor> factor;  // matching correlation factors
};

// Batched hyperparameter search for several targets that share one training
// input set. Because chol(E) is target-independent, candidate length scales
// are factorized once and scored against every target: a fixed log-space
// grid is shared by all targets, then each target golden-refines around its
// own best candidate (plus its warm start and `restarts - 1` seeded extras).
// Results are identical in contract to per-target optimize_hyper; only the
// factorization work is shared.
inline SharedHyperResult optimize_hyper_shared(
    const Matrix& sq_dists, const std::vector<std::vector<double>>& targets,
    const HyperSearchOptions& opt,
    const std::vector<std::optional<double>>& warm_lengths = {}) {
  opt.bounds.validate();
  if (opt.restarts < 1) throw input_error("optimize_hyper_shared: restarts must be >= 1");
  if (targets.empty()) throw input_error("optimize_hyper_shared: no targets");

  const double t_lo = std::log(opt.bounds.length_lo);
  const double t_hi = std::log(opt.bounds.length_hi);
  const double spacing =
      kSharedGridPoints > 1 ? (t_hi - t_lo) / (kSharedGridPoints - 1) : 0.0;

  std::map<double, detail::CorrelationFactor> cache;
  auto factor_at = [&](double t) -> const detail::CorrelationFactor& {
    auto it = cache.find(t);
    if (it == cache.end())
      it = cache.emplace(t, detail::factor_length_scale(sq_dists, std::exp(t))).first;
    return it->second;
  };

  SharedHyperResult out;
  out.hyper.resize(targets.size());
  out.factor.resize(targets.size());

  for (std::size_t k = 0; k < targets.size(); ++k) {
    std::span<const double> y(targets[k]);
    double best_t = 0.5 * (t_lo + t_hi);
    double best_c = opt.bounds.amplitude_lo;
    double best_lml = -std::numeric_limits<double>::infinity();
    bool any_ok = false;

    auto eval = [&](double t) {
      auto ev = detail::profiled_score(factor_at(t), y, opt.bounds);
      if (ev.ok) {
        any_ok = true;
        if (ev.lml > best_lml) {
          best_lml = ev.lml;
          best_t = t;
          best_c = ev.amplitude;
        }
      }
      return ev.ok ? ev.lml : -std::numeric_limits<double>::infinity();
    };

    for (int g = 0; g < kSharedGridPoints; ++g) eval(t_lo + spacing * g);
    if (k < warm_lengths.size() && warm_lengths[k])
      eval(std::min(std::max(std::log(*warm_lengths[k]), t_lo), t_hi));
    std::mt19937_64 rng(derive_seed(opt.seed, k));
    for (int r = 1; r < opt.restarts; ++r) eval(t_lo + (t_hi - t_lo) * uniform01(rng));

    // Golden refine around the best candidate found so far.
    const double golden = 0.6180339887498949;
    double a = std::max(t_lo, best_t - spacing);
    double b = std::min(t_hi, best_t + spacing);
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < opt.refine_iters; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = eval(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = eval(x1);
      }
    }

    if (!any_ok)
      throw numerical_error("optimize_hyper_shared: every candidate factorization failed",
                            -1);
    out.hyper[k].amplitude = best_c;
    out.hyper[k].length_scale = std::exp(best_t);
    out.hyper[k].jitter = default_jitter(best_c);
    out.factor[k] = factor_at(best_t);
  }
  return out;
}

}  // namespace alcs
