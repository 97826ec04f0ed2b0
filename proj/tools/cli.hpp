#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailforge::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kInvalidInput = 2,
    kUnreachable = 3,
};

/// Runs one command line (without the program name). Data goes to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailforge::cli
