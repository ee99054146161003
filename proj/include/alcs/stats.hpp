// Small statistics toolbox: moments, Student-t quantiles, confidence
// intervals. The t quantile is computed from the regularized incomplete beta
// function (continued-fraction evaluation, bisection inverse), accurate to
// ~1e-12 which is far below any tolerance used in the experiment outputs.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "alcs/errors.hpp"

namespace alcs {

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population (1/n) standard deviation.
inline double population_std(std::span<const double> v) {
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Sample (1/(n-1)) standard deviation.
inline double sample_std(std::span<const double> v) {
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double beta_continued_fraction(double a, double b, double x) {
  const double tiny = 1e-300;
  const double eps = 1e-15;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Quantile of Student's t distribution with `df` degrees of freedom,
// p in (0, 1). Uses P(T <= t) = 1 - I_{df/(df+t^2)}(df/2, 1/2)/2 for t >= 0.
inline double student_t_quantile(double p, int df) {
  if (df < 1) throw input_error("student_t_quantile: df must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw input_error("student_t_quantile: p must be in (0,1)");
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double tail = upper ? 2.0 * (1.0 - p) : 2.0 * p;  // I_x target
  const double a = 0.5 * df, b = 0.5;
  // Bisection on x = df/(df+t^2) in (0,1): I_x(a,b) is increasing in x.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (incomplete_beta(a, b, mid) < tail)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  double t = std::sqrt(df * (1.0 - x) / x);
  return upper ? t : -t;
}

struct ConfidenceInterval {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

// Two-sided Student-t confidence interval for the mean of `values`.
// A single value yields a degenerate interval equal to that value.
inline ConfidenceInterval t_confidence_interval(std::span<const double> values,
                                                double level = 0.95) {
  if (values.empty()) throw input_error("t_confidence_interval: no values");
  ConfidenceInterval ci;
  ci.count = values.size();
  ci.mean = mean(values);
  if (values.size() == 1) {
    ci.lower = ci.upper = ci.mean;
    return ci;
  }
  double s = sample_std(values);
  double t = student_t_quantile(0.5 + 0.5 * level, static_cast<int>(values.size()) - 1);
  double hw = t * s / std::sqrt(static_cast<double>(values.size()));
  ci.lower = ci.mean - hw;
  ci.upper = ci.mean + hw;
  return ci;
}

}  // namespace alcs
