#pragma once

// Command-line front end. Kept apart from main() so tests can drive the
// complete parse-and-dispatch path in-process with captured streams.
//
// Exit codes: 0 success (including --help), 2 for argument or configuration
// validation failures, 1 for runtime failures.

#include <iosfwd>

namespace modsel {

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace modsel
