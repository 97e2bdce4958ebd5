#pragma once

namespace ness::cli {

// Entry point of the command-line front end. Exit codes: 0 success,
// 2 validation error, 3 numerical failure; error records are written to
// standard error as single-line JSON.
int run(int argc, const char* const* argv);

} // namespace ness::cli
