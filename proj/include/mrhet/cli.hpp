#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrhet {

// Entry point of the mr_hetero tool. `args` excludes the program name.
// Returns 0 on success, 2 on data or configuration errors, 1 otherwise.
// Results go to `out` (or --output), failures to `err` as one JSON line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrhet
