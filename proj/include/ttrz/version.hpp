#pragma once

namespace ttrz {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ttrz
