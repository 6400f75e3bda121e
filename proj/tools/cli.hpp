#pragma once

// Command-line front end. Subcommands: bounds, optimum, simulate,
// infodensity, decode. Results go to --out, to $BUFQ_OUTPUT_DIR/<command>.<fmt>
// when that variable is set, or to `out` otherwise.
//
// Exit codes: 0 ok, 1 invalid configuration, 2 numerical non-convergence.

#include <iosfwd>
#include <string>
#include <vector>

#include "bufq/distributions.hpp"

namespace bufq::cli {

inline constexpr const char* output_dir_env = "BUFQ_OUTPUT_DIR";

// "lo:hi:count" (linear, both ends included) or "lo:hi:count:log".
std::vector<double> parse_grid(const std::string& text);

// exponential | deterministic | erlang:K | uniform | uniform:LO:HI, scaled so
// that the mean is 1/mu unless explicit bounds are given.
ServiceModel parse_service(const std::string& text, double mu);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bufq::cli
