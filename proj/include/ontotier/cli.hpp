#pragma once

#include <iosfwd>

namespace ontotier {

/// Entry point of the `ontotier` tool. Exit status 0 means clean; findings
/// and engine errors exit 1, usage errors follow CLI11.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ontotier
