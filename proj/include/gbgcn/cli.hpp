#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gbgcn {

/// Runs one `gbgcn` command line (args excludes the program name). Results go
/// to `out`, diagnostics to `err`. Returns the process exit code: 0 on
/// success, 1 on runtime failure, 2 on usage or configuration errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gbgcn
