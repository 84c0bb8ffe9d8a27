#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace otnet::cli {

/// Exit codes.
enum ExitCode : int { kOk = 0, kConfigError = 2, kValidationError = 3, kNonConvergence = 4, kIoError = 5 };

/// Runs one command. `args` excludes the program name, e.g.
/// {"rate-sweep", "--config", "sweep.json", "--seed", "3"}.
/// Failures print a single-line JSON error record to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace otnet::cli
