#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kvariates {

// Exit codes: 0 success, 1 runtime error, 2 usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// argv without the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kvariates
