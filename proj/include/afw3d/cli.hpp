#pragma once

// Command-line front end. Every subcommand writes <out>/<stem>.csv and
// <out>/<stem>.json (stem = subcommand words joined by '_') and prints the
// same checks, summary and table to stdout.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afw3d/report.hpp"

namespace afw3d {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunConfig {
  std::vector<std::string> command;  // e.g. {"verify", "tensor"}
  std::string mesh_path;             // empty: unit cube generator
  std::optional<int> n;              // cube subdivisions
  std::optional<int> r;              // uniform order
  std::string orders;                // "0,1,2,..." or "random:LO-HI"
  double lambda = 1.0;
  double mu = 1.0;
  std::optional<int> levels;
  std::uint64_t seed = 42;
  std::string out = "afw3d_out";
  double tol_scale = 1.0;
  int samples = 10;
  std::string case_name = "sine";  // "sine" or "patch"
  int order_cap = 4;
};

/// Sets one key (flag name without dashes) from its text value. Throws
/// ConfigError on unknown keys or unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads key=value lines; '#' starts a comment. Throws ConfigError.
void apply_config_file(RunConfig& config, const std::string& path);

/// Parses an explicit per-tet order list, naming the offending tet on error.
std::vector<int> parse_order_list(const std::string& text, int cap);

/// Builds the report for a subcommand without writing files.
Report build_report(const RunConfig& config);

/// Runs the subcommand, writes the report files and prints the summary.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (flags override --config file values) and calls run.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace afw3d
