#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace qkinetic::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitSolver = 3, kExitVerification = 4 };

/// Command-line overrides; unset fields keep the configuration value.
struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = "qkinetic-out";
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  bool conservative_fix = false;
  bool snapshots = false;
  std::optional<std::size_t> kernel_cache_bytes;
  std::optional<std::string> sweep_axis;
};

/// time_march from the configured initial datum. Writes diagnostics.csv,
/// manifest.json and optional snapshots/ under out_dir.
int cmd_run(const CommandOptions& options, std::ostream& log);

/// Every configured verifier check; writes verify_report.json and
/// manifest.json. Exit 0 iff all reports pass.
int cmd_verify(const CommandOptions& options, std::ostream& log);

/// One run per sweep value; writes sweep.csv (axis column first),
/// sweep_summary.json and manifest.json. Failed runs are recorded and the
/// sweep continues.
int cmd_sweep(const CommandOptions& options, std::ostream& log);

}  // namespace qkinetic::cli
