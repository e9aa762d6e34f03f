#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bellcav::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// bell-cli <scan|contour|locality|oracle-check> [options]; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bellcav::app
