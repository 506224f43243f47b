#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace admdae {

/// Entry point of the `admdae` tool. Subcommands: check, solve, verify, demo.
/// Returns 0 on success, 1 on numeric or validation failure, 2 on bad usage.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace admdae
