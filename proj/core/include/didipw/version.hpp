#pragma once

namespace didipw {

inline constexpr const char* kVersion = "0.1.0";

} // namespace didipw
