#ifndef REGPROB_CLI_HPP
#define REGPROB_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace regprob {

/// Dispatches the command line. Returns 0 on success, 1 on a module error
/// (with a machine-readable error object on out), 2 on usage errors.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace regprob

#endif
