#pragma once

#include <string>
#include <vector>

namespace lil::cli {

/// Entry point behind the `lil` binary. Subcommands: generate, build,
/// validate, bench, pareto. Returns the process exit code; never
/// prompts.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace lil::cli
