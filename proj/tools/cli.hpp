#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jumpsl::cli {

/// Runs one subcommand. `args` excludes the program name. Results go to the
/// --output file (written atomically) or to `out`; diagnostics go to `err`.
/// Returns 0 on success, 1 on validation errors, 2 on numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jumpsl::cli
