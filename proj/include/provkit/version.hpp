#pragma once

namespace provkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace provkit
