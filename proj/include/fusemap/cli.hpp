#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fusemap {

// Runs one CLI invocation (subcommand plus flags, no program name).
// Returns the process exit status; machine-readable errors go to `err`
// as a single "error: <kind>: <message>" line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fusemap
