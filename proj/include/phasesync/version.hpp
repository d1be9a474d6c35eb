#pragma once

namespace phasesync {
inline constexpr const char* kVersion = "0.1.0";
}
