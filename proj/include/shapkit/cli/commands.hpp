#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "shapkit/cli/run_config.hpp"

namespace shapkit::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Parses `args` (without the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_attribute(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_audit(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_ingest_check(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Closed-form inference-call count of a deterministic run with one sample
/// per coalition; none for the cached sliding window, whose count depends on
/// window overlap.
std::optional<std::size_t> expected_calls(Method method, std::size_t n,
                                          std::optional<std::size_t> window_size,
                                          bool window_cache);

/// Shortest decimal that round-trips to `value`.
std::string format_number(double value);

}  // namespace shapkit::cli
