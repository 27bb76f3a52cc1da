#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "symmwell/config.hpp"

namespace symmwell::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInvalidConfig = 2,
  kNotAdmissible = 3,
  kNumericalFailure = 4,
};

const std::vector<std::string>& command_names();

/// Executes one subcommand. Data goes to out, diagnostics to err.
int run(std::string_view command, const Config& config, std::ostream& out, std::ostream& err);

/// Worker count: config.threads (0 = hardware concurrency), capped by the
/// SYMMWELL_THREADS environment variable when set.
unsigned effective_threads(const Config& config);

/// %.17g, with "nan"/"inf"/"-inf" for non-finite values.
std::string format_real(double x);

}  // namespace symmwell::cli
