// Turns raw loading-case descriptions (a discrete current velocity profile
// plus a parametric wave) into the 33-component feature vector used by the
// surrogate, and provides the feature/target normalizations.
//
// Current encoding: compass/angle columns become velocity components
// u_x = u cos(theta), u_y = u sin(theta), which are then rescaled by the
// square roots of trapezoid-rule weights,
//
//   v_0 = sqrt((x_1-x_0)/2) u_0,
//   v_i = sqrt((x_{i+1}-x_{i-1})/2) u_i   (interior),
//   v_n = sqrt((x_n-x_{n-1})/2) u_n,
//
// so that sum_i |v_i|^2 equals the trapezoid approximation of the squared
// L2 norm of the velocity field over the water column. Depths are shared by
// every case in a pool, so they carry no information beyond position and are
// dropped after the rescale.
//
// Wave encoding: [alpha_x, alpha_y, sigma, gamma, omega_p] with
// alpha_x = alpha cos(azimuth), alpha_y = alpha sin(azimuth) and
// omega_p = 2 pi / T_p.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alcs/errors.hpp"
#include "alcs/linalg.hpp"
#include "alcs/targets.hpp"

namespace alcs {

inline constexpr std::size_t kCurrentNodeCount = 14;
inline constexpr std::size_t kCurrentFeatureCount = 2 * kCurrentNodeCount;  // 28
inline constexpr std::size_t kWaveFeatureCount = 5;
inline constexpr std::size_t kFeatureCount = kCurrentFeatureCount + kWaveFeatureCount;  // 33

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;

// Default 14-level depth grid (m) used by the bundled loading-case format.
inline const std::array<double, kCurrentNodeCount>& default_depth_grid() {
  static const std::array<double, kCurrentNodeCount> grid = {
      0, 50, 100, 150, 200, 250, 300, 350, 375, 800, 1200, 1600, 2000, 2200};
  return grid;
}

// 16-point compass rose, N = 0 degrees, clockwise through NNW = 337.5.
inline double compass_to_degrees(const std::string& point) {
  static const std::array<std::pair<std::string_view, double>, 16> rose = {{
      {"N", 0.0},    {"NNE", 22.5}, {"NE", 45.0},  {"ENE", 67.5},
      {"E", 90.0},   {"ESE", 112.5}, {"SE", 135.0}, {"SSE", 157.5},
      {"S", 180.0},  {"SSW", 202.5}, {"SW", 225.0}, {"WSW", 247.5},
      {"W", 270.0},  {"WNW", 292.5}, {"NW", 315.0}, {"NNW", 337.5},
  }};
  for (const auto& [name, deg] : rose)
    if (point == name) return deg;
  throw input_error("compass_to_degrees: unknown compass point '" + point + "'");
}

struct CurrentNode {
  double depth_m = 0.0;
  double speed_ms = 0.0;
  double angle_deg = 0.0;
};

struct CurrentProfile {
  std::vector<CurrentNode> nodes;

  void validate() const {
    if (nodes.size() != kCurrentNodeCount)
      throw input_error("CurrentProfile: expected " + std::to_string(kCurrentNodeCount) +
                        " nodes, got " + std::to_string(nodes.size()));
    if (nodes.front().depth_m != 0.0)
      throw input_error("CurrentProfile: first depth must be 0");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i > 0 && !(nodes[i].depth_m > nodes[i - 1].depth_m))
        throw input_error("CurrentProfile: depths must be strictly increasing");
      if (!(nodes[i].speed_ms >= 0.0))
        throw input_error("CurrentProfile: speeds must be non-negative");
    }
  }
};

struct WaveSpec {
  double height_m = 0.0;
  double period_s = 0.0;   // T_p
  double azimuth_deg = 0.0;
  double alpha = 0.0;
  double gamma = 1.0;      // enhancement factor
  double sigma = 0.07;     // secondary width; conventional value when unspecified

  void validate() const {
    if (!(period_s > 0.0)) throw input_error("WaveSpec: period must be positive");
    if (!(height_m >= 0.0)) throw input_error("WaveSpec: height must be non-negative");
    if (!(gamma >= 1.0)) throw input_error("WaveSpec: gamma must be >= 1");
    if (!(alpha > 0.0)) throw input_error("WaveSpec: alpha must be positive");
    if (!(sigma > 0.0)) throw input_error("WaveSpec: sigma must be positive");
  }

  double peak_angular_frequency() const { return 2.0 * kPi / period_s; }
};

// [vx at each depth, vy at each depth], trapezoid-weight rescaled.
inline std::array<double, kCurrentFeatureCount> encode_current(const CurrentProfile& p) {
  p.validate();
  const std::size_t n = p.nodes.size();
  std::array<double, kCurrentFeatureCount> out{};
  for (std::size_t i = 0; i < n; ++i) {
    double span;
    if (i == 0)
      span = p.nodes[1].depth_m - p.nodes[0].depth_m;
    else if (i + 1 == n)
      span = p.nodes[n - 1].depth_m - p.nodes[n - 2].depth_m;
    else
      span = p.nodes[i + 1].depth_m - p.nodes[i - 1].depth_m;
    const double w = std::sqrt(0.5 * span);
    const double theta = p.nodes[i].angle_deg * kDegToRad;
    out[i] = w * p.nodes[i].speed_ms * std::cos(theta);
    out[kCurrentNodeCount + i] = w * p.nodes[i].speed_ms * std::sin(theta);
  }
  return out;
}

// [alpha_x, alpha_y, sigma, gamma, omega_p].
inline std::array<double, kWaveFeatureCount> encode_wave(const WaveSpec& w) {
  w.validate();
  const double az = w.azimuth_deg * kDegToRad;
  return {w.alpha * std::cos(az), w.alpha * std::sin(az), w.sigma, w.gamma,
          w.peak_angular_frequency()};
}

inline std::vector<double> assemble_features(const CurrentProfile& current,
                                             const WaveSpec& wave) {
  auto c = encode_current(current);
  auto w = encode_wave(wave);
  std::vector<double> x(kFeatureCount);
  std::copy(c.begin(), c.end(), x.begin());
  std::copy(w.begin(), w.end(), x.begin() + kCurrentFeatureCount);
  return x;
}

// Per-feature mean and population standard deviation over a pool.
// Features with zero spread are mean-subtracted but not divided.
struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // 0 marks a constant feature

  double apply_one(std::size_t j, double v) const {
    double s = stddev[j];
    return s > 0.0 ? (v - mean[j]) / s : v - mean[j];
  }
};

inline NormalizationStats fit_pool_normalization(const Matrix& pool) {
  if (pool.rows == 0) throw input_error("fit_pool_normalization: empty pool");
  NormalizationStats st;
  st.mean.assign(pool.cols, 0.0);
  st.stddev.assign(pool.cols, 0.0);
  for (std::size_t i = 0; i < pool.rows; ++i)
    for (std::size_t j = 0; j < pool.cols; ++j) st.mean[j] += pool(i, j);
  for (double& m : st.mean) m /= static_cast<double>(pool.rows);
  for (std::size_t i = 0; i < pool.rows; ++i)
    for (std::size_t j = 0; j < pool.cols; ++j) {
      double d = pool(i, j) - st.mean[j];
      st.stddev[j] += d * d;
    }
  for (double& s : st.stddev) s = std::sqrt(s / static_cast<double>(pool.rows));
  return st;
}

inline Matrix apply_normalization(const NormalizationStats& st, const Matrix& pool) {
  if (st.mean.size() != pool.cols)
    throw input_error("apply_normalization: dimension mismatch");
  Matrix out(pool.rows, pool.cols);
  for (std::size_t i = 0; i < pool.rows; ++i)
    for (std::size_t j = 0; j < pool.cols; ++j) out(i, j) = st.apply_one(j, pool(i, j));
  return out;
}

// Per-target affine transform y_norm = (y - offset) / scale fitted on the
// currently labeled rows. FX columns are z-scored (population std); DNVUF
// columns pass through. Degenerate cases (single row, zero spread) keep
// scale 1 so the transform stays invertible.
struct TargetNormalization {
  std::array<double, kTargetCount> offset{};
  std::array<double, kTargetCount> scale{1, 1, 1, 1, 1, 1};

  double normalize(std::size_t target, double v) const {
    return (v - offset[target]) / scale[target];
  }
  double denormalize(std::size_t target, double v) const {
    return v * scale[target] + offset[target];
  }
  // Standard deviations transform by the scale alone.
  double denormalize_std(std::size_t target, double s) const { return s * scale[target]; }
};

inline TargetNormalization fit_target_normalization(
    const std::vector<TargetVector>& labeled) {
  if (labeled.empty()) throw input_error("fit_target_normalization: no labeled rows");
  TargetNormalization tn;
  for (std::size_t t = 0; t < kTargetCount; ++t) {
    if (!is_fx_target(t)) continue;
    double m = 0.0;
    for (const auto& row : labeled) m += row[t];
    m /= static_cast<double>(labeled.size());
    tn.offset[t] = m;
    if (labeled.size() >= 2) {
      double ss = 0.0;
      for (const auto& row : labeled) ss += (row[t] - m) * (row[t] - m);
      double sd = std::sqrt(ss / static_cast<double>(labeled.size()));
      if (sd > 0.0) tn.scale[t] = sd;
    }
  }
  return tn;
}

inline std::vector<TargetVector> normalize_targets(const std::vector<TargetVector>& labeled,
                                                   const TargetNormalization& tn) {
  std::vector<TargetVector> out(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i)
    for (std::size_t t = 0; t < kTargetCount; ++t)
      out[i][t] = tn.normalize(t, labeled[i][t]);
  return out;
}

}  // namespace alcs
