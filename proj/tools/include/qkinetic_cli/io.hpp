#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qkinetic/config.hpp"
#include "qkinetic/field.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/verifier.hpp"

namespace qkinetic::cli {

/// Line-oriented CSV writer that flushes every row, so a failed run still
/// leaves the rows written so far.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header);
  void row(const std::string& line);
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Raw little-endian float64 values of F in (x, v) order, plus a JSON sidecar
/// `<stem>.json` describing the shape and grids. Returns both paths.
std::vector<std::filesystem::path> write_snapshot(const std::filesystem::path& stem, const DistributionField& F,
                                                  const RunConfig& config, int window, double time);

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::uint64_t seed = 0;
  std::string start_time;
  std::string end_time;
  std::string command;
  std::string status;
  int exit_code = 0;
  std::vector<std::string> files;  ///< relative to the output directory
};

/// Writes `manifest.json` into out_dir; the manifest lists itself.
std::filesystem::path write_manifest(const std::filesystem::path& out_dir, RunManifest manifest);

/// JSON array with one object per report.
void write_reports(const std::filesystem::path& path, const std::vector<BoundReport>& reports);

/// UTC wall time as ISO 8601.
std::string utc_now();

}  // namespace qkinetic::cli
