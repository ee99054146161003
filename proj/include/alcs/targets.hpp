// The six target variables produced per loading case: the DNVUF-201
// utilization factor and the FX top tension, each for the empty, mean
// (oil/water mixture) and water filling states.
#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace alcs {

inline constexpr std::size_t kTargetCount = 6;

enum class Target : std::size_t {
  DnvEmpty = 0,
  DnvMean = 1,
  DnvWater = 2,
  FxEmpty = 3,
  FxMean = 4,
  FxWater = 5,
};

inline constexpr std::array<std::string_view, kTargetCount> kTargetNames = {
    "dnv_empty", "dnv_mean", "dnv_water", "fx_empty", "fx_mean", "fx_water"};

// FX tensions are z-scored before regression; utilization factors are not.
inline constexpr bool is_fx_target(std::size_t index) { return index >= 3; }

using TargetVector = std::array<double, kTargetCount>;

}  // namespace alcs
