#pragma once

namespace subfreq {

inline constexpr const char* kVersion = "0.1.0";

} // namespace subfreq
