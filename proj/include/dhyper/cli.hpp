#ifndef DHYPER_CLI_HPP
#define DHYPER_CLI_HPP

namespace dhyper {

/// Parses and executes one CLI invocation. Exit codes: 0 success,
/// 1 assertion/property failure, 2 configuration error, 3 capacity error.
int run_cli(int argc, const char* const* argv);

}  // namespace dhyper

#endif  // DHYPER_CLI_HPP
