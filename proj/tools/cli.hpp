#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qwalk::cli {

// Full command-line entry point (args excludes the program name).
// Exit codes: 0 success, 1 computational failure, 2 usage/domain errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qwalk::cli
