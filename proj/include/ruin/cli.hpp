#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ruin::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kDegenerate = 2,
  kViolation = 3,
};

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace ruin::cli
