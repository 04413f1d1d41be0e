#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dialstruct::app {

// Runs the command line `args` (without the program name). Returns 0 on
// success, 2 on usage or data errors and 1 on unexpected failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace dialstruct::app
