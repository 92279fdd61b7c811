#pragma once

namespace cardiosync {

inline constexpr const char* kToolName = "cardiosync";
inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace cardiosync
