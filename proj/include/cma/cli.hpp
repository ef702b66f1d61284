// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cma::cli {

/// Process exit codes (sysexits where one applies).
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kStepUnderflow = 2;
inline constexpr int kUsage = 64;
inline constexpr int kNoInput = 66;
inline constexpr int kSoftware = 70;
inline constexpr int kIoError = 74;
}  // namespace exit_code

struct SolveArgs {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  int threads = 1;
};

/// Runs one solve and writes phi.cmaf, metric.cmmf, trace.json and
/// manifest.json into args.out. 0 on convergence, 2 on step underflow,
/// 64 on a bad configuration, 66 if the configuration cannot be read,
/// 74 if outputs cannot be written.
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);

/// Runs a verification suite and prints its JSON report; with `out_dir`,
/// also writes verify_<suite>.json there. 0 iff the suite passes, 64 for an
/// unknown suite.
int cmd_verify(const std::string& suite, const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
               std::ostream& err);

/// Prints a trace as a table; optionally writes CSV. `trace` may name a
/// trace file or a solve output directory. 66 if missing or corrupt.
int cmd_report(const std::filesystem::path& trace, const std::optional<std::filesystem::path>& csv,
               std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cma::cli
