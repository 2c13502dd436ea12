#pragma once

#include <iosfwd>

namespace betamix {

/// Entry point of the `betamix` tool. Returns 0 on success, 2 on a usage
/// error and 1 on a runtime error (bad file, invalid parameters).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace betamix
