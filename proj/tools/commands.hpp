#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pfdde::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kNumerical = 3,
    kIo = 4,
};

/// Runs one pfdde invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pfdde::cli
