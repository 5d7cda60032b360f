#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pursuit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotPerfect = 2;

/// Entry point shared by the `pursuit` binary and the tests. `args` excludes
/// the program name, e.g. {"train", "--seed", "7"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pursuit::cli
