#pragma once

namespace hybrik {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hybrik
