#pragma once

namespace cf {
inline constexpr const char* version = "0.1.0";
}
