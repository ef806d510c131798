#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ncap {

// argv-style entry point: args[0] is the program name. Dispatches to the
// subcommands (young, young-table, energy, curvature, minimize, verify) and
// returns the process exit code: 0 on success, 1 when a verification suite
// fails, 2 on invalid input (one-line diagnostic on `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Same, writing to std::cout / std::cerr.
int run_cli(const std::vector<std::string>& args);

}  // namespace ncap
