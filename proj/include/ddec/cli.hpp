#pragma once

// Command-line driver. Exit codes: 0 success, 1 usage, 2 parse error,
// 3 engine refusal.

#include <iostream>
#include <string>
#include <vector>

namespace ddec {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitRefused = 3 };

int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr,
                std::istream& in = std::cin);

}  // namespace ddec
