#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace patentkb::cli {

/// Runs one subcommand. `args` excludes the program name.
/// Returns 0 on success, 1 on invalid input or arguments, 2 on I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace patentkb::cli
