#pragma once

#include <iosfwd>

namespace sparsevi::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
// Every failure writes exactly one "error: ..." line to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsevi::cli
