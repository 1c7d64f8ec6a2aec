#ifndef PROXSIM_CLI_DISPATCH_H_
#define PROXSIM_CLI_DISPATCH_H_

#include <iosfwd>

namespace proxsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitDiagnostics = 3,
};

// Runs one `proxsim` command line. Normal output goes to `out`, messages and
// diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace proxsim

#endif  // PROXSIM_CLI_DISPATCH_H_
