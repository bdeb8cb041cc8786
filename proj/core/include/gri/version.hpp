#pragma once

namespace gri {
inline constexpr const char* kVersion = "0.1.0";
}
