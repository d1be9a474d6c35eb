#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasesync::cli {

// Exit statuses.
inline constexpr int kSuccess = 0;
inline constexpr int kFailure = 1;  // acceptance failure or a numerical/validation error
inline constexpr int kUsage = 2;    // bad flags, unreadable or malformed files

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasesync::cli
