#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/config.hpp"

namespace lqsd::cli {

enum ExitStatus : int {
  kStatusOk = 0,
  kStatusFailure = 1,
  kStatusParse = 2,
  kStatusModel = 3,
  kStatusTolerance = 4,
};

/// Command-line values that take precedence over the config file.
struct RunOverrides {
  std::optional<std::string> out_prefix;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

/// Formats a double with 17 significant digits in scientific notation.
std::string format_real(double v);

/// Runs the configured task, writes `<prefix>-summary.csv` and
/// `<prefix>-<task>.csv`, and returns the exit status. Diagnostics go to `err`,
/// verification lines to `out`.
int run(const RunConfig& config, const RunOverrides& overrides, std::ostream& out,
        std::ostream& err);

/// Parses flags (--config, --out, --seed, --threads) and calls run().
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lqsd::cli
