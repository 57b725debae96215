#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace newtonflow::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns 0 on success, 1 on usage errors, 2 on solver or I/O
/// failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newtonflow::cli
