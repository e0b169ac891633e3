#pragma once

namespace parcs::cli {

// Full command-line entry point; returns the process exit code
// (0 success, 2 model/input error, 3 IO error).
int run(int argc, const char* const* argv);

} // namespace parcs::cli
