#pragma once

namespace rmwg {
inline constexpr const char* kVersion = "0.1.0";
}
