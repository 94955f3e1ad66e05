#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ahmc {

/// Entry point of the `ahmc` tool. Exit codes: 0 holds, 1 fails (or an
/// invalid model for `validate`), 2 unknown/timeout/inconclusive, 3 usage
/// or input error.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ahmc
