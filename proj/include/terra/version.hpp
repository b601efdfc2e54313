#pragma once

namespace terra {
inline constexpr const char* kVersion = "1.0.0";
}
