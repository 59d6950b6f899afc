#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prodsv::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kBudgetExceeded = 2,
  kNumericalError = 3,
};

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace prodsv::cli
