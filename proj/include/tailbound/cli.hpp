// cli.hpp
//
// Command-line front end. run() takes the arguments after the program name
// and returns the process exit status:
//   0 success, 1 computation or validation error, 2 argument or parse error,
//   3 soundness failure.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailbound {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailbound
