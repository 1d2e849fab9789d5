#ifndef BLOCHOBS_CLI_HPP
#define BLOCHOBS_CLI_HPP

#include <ostream>

namespace blochobs {

/// Exit codes: 0 success, 1 computational failure, 2 usage or config error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blochobs

#endif  // BLOCHOBS_CLI_HPP
