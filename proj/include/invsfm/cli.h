#pragma once

#include <iosfwd>

#include "invsfm/errors.h"

namespace invsfm {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitNotRotation = 1,
  kExitUsage = 2,
  kExitDegenerate = 3,
  kExitNotConverged = 4,
  kExitInsufficientData = 5,
};

ExitCode exit_code_for(ErrorCode code);

// Subcommands: synth, invariants, detect-rotation, reconstruct, evaluate.
// Messages go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace invsfm
