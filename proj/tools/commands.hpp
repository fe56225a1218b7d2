#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace depthgaze::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIncomplete = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `depthgaze` binary and the tests.
/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depthgaze::cli
