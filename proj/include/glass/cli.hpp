#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace glass::cli {

// Parses and runs one command. Returns 0 on success, 1 on a runtime failure
// and 2 on a usage error; failures print a single "error: ..." line to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace glass::cli
