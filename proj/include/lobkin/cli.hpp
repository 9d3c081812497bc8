#ifndef LOBKIN_CLI_HPP
#define LOBKIN_CLI_HPP

namespace lobkin {

// Exit codes: 0 success, 2 malformed input or bad usage, 3 input too thin for
// the requested statistic.
int run_cli(int argc, const char* const* argv);

}  // namespace lobkin

#endif
