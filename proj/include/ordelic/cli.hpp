#pragma once

namespace ordelic {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBoundViolation = 3;
inline constexpr int kExitSearchFailure = 4;

/// Entry point of the `ordelic` command-line tool; returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace ordelic
