#pragma once

namespace gapcap {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace gapcap
