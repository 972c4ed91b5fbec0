#pragma once

namespace qlockin {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qlockin
