#pragma once

#include <iosfwd>

namespace polent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSimulation = 3;

/// Entry point of the `polent` tool. Subcommands: analyze-sweep,
/// simulate-sweep, rate-fidelity, longrun, bounds, gen-config.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polent::cli
