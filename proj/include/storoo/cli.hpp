#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace storoo {

/// Entry point of the `storoo` tool. `args` excludes the program name.
/// Subcommands: run, optimum, bounds, theory. Returns 0 on success, 2 for
/// malformed flags or configuration, 1 for other failures.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace storoo
