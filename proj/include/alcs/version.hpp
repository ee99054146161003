#pragma once

namespace alcs {

inline constexpr const char* kVersion = "0.1.0";
// Bump when any emitted CSV or manifest schema changes.
inline constexpr const char* kSchemaVersion = "1";

}  // namespace alcs
