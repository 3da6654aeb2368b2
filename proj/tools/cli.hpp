#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace momexp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command. `args` excludes the program name. Standard output
/// receives exactly one JSON document on success or numeric failure;
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace momexp::cli
