#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bisstar {

inline constexpr const char* kCliVersion = "0.1.0";

/// Runs the command-line front end.  Exit status: 0 on success, 1 when the
/// run's statistical conclusion is "no bi-s*-concave fit at this level"
/// (a valid result, detailed in the JSON report), 2 on input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bisstar
