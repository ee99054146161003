// Label sources for queried loading cases.
//
//  * LabeledTable replays pre-computed simulation results from CSV.
//  * SyntheticOracle is a deterministic smooth stand-in for the physics
//    solver, for desk-scale experiments.
//  * jonswap_spectrum and dnvuf201 are reference implementations of the
//    wave spectrum and the combined-loading utilization factor; they
//    validate inputs and serve as documentation of the underlying formulas.
//    Table labels are never recomputed from them.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alcs/csv.hpp"
#include "alcs/encode.hpp"
#include "alcs/errors.hpp"
#include "alcs/rng.hpp"
#include "alcs/targets.hpp"

namespace alcs {

// ---------------------------------------------------------------- table ---

// Precomputed labels for one riser configuration, keyed by case id.
struct LabeledTable {
  std::string config_id;
  std::map<int, TargetVector> rows;

  const TargetVector& lookup(int case_id) const {
    auto it = rows.find(case_id);
    if (it == rows.end())
      throw lookup_error("LabeledTable: unknown case id " + std::to_string(case_id));
    return it->second;
  }

  bool contains(int case_id) const { return rows.count(case_id) != 0; }
};

// CSV columns: case_id, dnv_empty, dnv_mean, dnv_water, fx_empty, fx_mean, fx_water.
inline LabeledTable read_labeled_table(const std::string& path) {
  CsvTable t = read_csv(path);
  LabeledTable table;
  table.config_id = path;
  int id_col = t.column("case_id");
  if (id_col < 0) throw parse_error(path, 1, "missing column case_id");
  std::array<int, kTargetCount> cols{};
  for (std::size_t k = 0; k < kTargetCount; ++k) {
    cols[k] = t.column(std::string(kTargetNames[k]));
    if (cols[k] < 0)
      throw parse_error(path, 1, "missing column " + std::string(kTargetNames[k]));
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    int id = static_cast<int>(parse_long(t, r, id_col));
    TargetVector v{};
    for (std::size_t k = 0; k < kTargetCount; ++k) v[k] = parse_double(t, r, cols[k]);
    if (!table.rows.emplace(id, v).second)
      throw parse_error(path, static_cast<long>(r) + 2,
                        "duplicate case id " + std::to_string(id));
  }
  return table;
}

inline std::string labeled_table_csv(const LabeledTable& table) {
  std::string body = "case_id";
  for (auto name : kTargetNames) body += "," + std::string(name);
  body += "\n";
  for (const auto& [id, v] : table.rows) {
    body += std::to_string(id);
    for (double x : v) body += "," + format_double(x);
    body += "\n";
  }
  return body;
}

// ------------------------------------------------------------ synthetic ---

// Deterministic smooth stand-in for the physics solver. For each target t
// the label is
//
//   value_t(x) = base_t + amp_t * logistic(w_t . x + b_t) + ripple_t * sin(c_t . x)
//
// where w_t and c_t are unit-norm direction vectors and b_t is a scalar in
// [-1, 1]. Coefficient generation is fixed bit-for-bit:
//
//   seed_t   = (t+1)-th output of the splitmix64 stream seeded with config_seed
//   rng_t    = std::mt19937_64(seed_t)
//   w_t      = unit_vector(rng_t, dim)    (Box-Muller normals, normalized)
//   b_t      = 2*uniform01(rng_t) - 1
//   c_t      = unit_vector(rng_t, dim)
//
// with uniform01(r) = ((r() >> 11) + 0.5) * 2^-53 and Box-Muller as in
// rng.hpp. Constants place utilization factors in [0.40, 0.68] and tensions
// in [-4500, -2400] N for every input, since both logistic and sine are
// globally bounded.
class SyntheticOracle {
 public:
  explicit SyntheticOracle(std::uint64_t config_seed, std::size_t dim = kFeatureCount)
      : dim_(dim) {
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      std::mt19937_64 rng(derive_seed(config_seed, t));
      coeff_[t].direction = unit_vector(rng, dim_);
      coeff_[t].bias = 2.0 * uniform01(rng) - 1.0;
      coeff_[t].ripple_direction = unit_vector(rng, dim_);
      if (is_fx_target(t)) {
        coeff_[t].base = -4450.0;
        coeff_[t].amp = 2000.0;
        coeff_[t].ripple = 50.0;
      } else {
        coeff_[t].base = 0.42;
        coeff_[t].amp = 0.24;
        coeff_[t].ripple = 0.02;
      }
    }
  }

  std::size_t dim() const { return dim_; }

  TargetVector operator()(std::span<const double> x) const {
    if (x.size() != dim_)
      throw input_error("SyntheticOracle: expected dimension " + std::to_string(dim_));
    TargetVector out{};
    for (std::size_t t = 0; t < kTargetCount; ++t) {
      const auto& c = coeff_[t];
      double z = c.bias, s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) {
        z += c.direction[j] * x[j];
        s += c.ripple_direction[j] * x[j];
      }
      out[t] = c.base + c.amp / (1.0 + std::exp(-z)) + c.ripple * std::sin(s);
    }
    return out;
  }

  // |value(x) - value(x')| <= lipschitz_bound(t) * |x - x'|.
  double lipschitz_bound(std::size_t target) const {
    return coeff_[target].amp * 0.25 + coeff_[target].ripple;
  }

 private:
  struct TargetCoefficients {
    std::vector<double> direction;         // w_t, unit norm
    double bias = 0.0;                     // b_t
    std::vector<double> ripple_direction;  // c_t, unit norm
    double base = 0.0, amp = 0.0, ripple = 0.0;
  };
  std::size_t dim_;
  std::array<TargetCoefficients, kTargetCount> coeff_;
};

// Evaluates a synthetic configuration over a whole pool so downstream code
// can treat it exactly like a replayed results table.
inline LabeledTable tabulate_synthetic(const SyntheticOracle& oracle,
                                       const std::vector<int>& ids, const Matrix& features) {
  LabeledTable t;
  t.config_id = "synthetic";
  for (std::size_t i = 0; i < ids.size(); ++i)
    t.rows.emplace(ids[i], oracle(features.row_span(i)));
  return t;
}

// -------------------------------------------------------------- jonswap ---

// JONSWAP power spectrum
//   S(w) = (alpha g^2 / w^5) exp(-5/4 (w_p/w)^4) gamma^r,
//   r    = exp(-(w - w_p)^2 / (2 sigma^2 w_p^2)).
inline double jonswap_spectrum(double omega, const WaveSpec& w, double gravity = 9.81) {
  w.validate();
  if (!(omega > 0.0)) throw input_error("jonswap_spectrum: omega must be positive");
  const double wp = w.peak_angular_frequency();
  const double ratio = wp / omega;
  const double pm = (w.alpha * gravity * gravity) / std::pow(omega, 5) *
                    std::exp(-1.25 * ratio * ratio * ratio * ratio);
  const double dw = omega - wp;
  const double r = std::exp(-dw * dw / (2.0 * w.sigma * w.sigma * wp * wp));
  return pm * std::pow(w.gamma, r);
}

// ------------------------------------------------------------- dnvuf201 ---

struct DnvInputs {
  double safety_class_factor = 1.0;   // gamma_SC
  double material_factor = 1.0;       // gamma_m
  double bending_moment = 0.0;        // M_d, N*m
  double plastic_moment = 1.0;        // M_k, N*m
  double effective_tension = 0.0;     // T_e, N
  double plastic_tension = 1.0;       // T_k, N
  double internal_pressure = 0.0;     // p_i, Pa
  double external_pressure = 0.0;     // p_o, Pa
  double minimum_pressure = 0.0;      // p_min, Pa
  double burst_pressure = 1.0;        // p_b, Pa
  double collapse_pressure = 1.0;     // p_c, Pa

  void validate() const {
    if (!(plastic_moment > 0.0) || !(plastic_tension > 0.0) || !(burst_pressure > 0.0) ||
        !(collapse_pressure > 0.0))
      throw input_error("DnvInputs: plastic/burst/collapse capacities must be positive");
  }
};

// Combined-loading utilization factor (DNVGL-ST-F201 style):
//
//   p_i >  p_o:  gSC gm [ (|Md|/Mk) sqrt(1 - ((p_i-p_o)/p_b)^2) + (Te/Tk)^2 ]
//                  + ((p_i-p_o)/p_b)^2
//   p_i <= p_o:  (gSC gm)^2 { [ |Md|/Mk + (Te/Tk)^2 ]^2 + ((p_o-p_min)/p_c)^2 }
inline double dnvuf201(const DnvInputs& d) {
  d.validate();
  const double g = d.safety_class_factor * d.material_factor;
  const double moment = std::fabs(d.bending_moment) / d.plastic_moment;
  const double tension = d.effective_tension / d.plastic_tension;
  if (d.internal_pressure > d.external_pressure) {
    const double dp = (d.internal_pressure - d.external_pressure) / d.burst_pressure;
    const double radicand = 1.0 - dp * dp;
    if (radicand < 0.0)
      throw domain_error("dnvuf201: pressure differential exceeds burst capacity");
    return g * (moment * std::sqrt(radicand) + tension * tension) + dp * dp;
  }
  const double dp = (d.external_pressure - d.minimum_pressure) / d.collapse_pressure;
  const double inner = moment + tension * tension;
  return g * g * (inner * inner + dp * dp);
}

}  // namespace alcs
