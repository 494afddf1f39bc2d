#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rageval/error.hpp"

namespace rageval {

// 0 success, 1 user error, 2 backend/runtime failure.
int exit_code_for(ErrorCode code);

// Runs `rageval <args...>` (program name excluded).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rageval
