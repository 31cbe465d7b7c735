#pragma once

namespace memtrack {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kRunSchemaVersion = 1;
inline constexpr int kCsvSchemaVersion = 1;

}  // namespace memtrack
