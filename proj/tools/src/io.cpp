#include "qkinetic_cli/io.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>

#include "json.hpp"

#include "qkinetic/error.hpp"

namespace qkinetic::cli {

using nlohmann::json;

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::ofstream open_or_throw(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& header)
    : path_(path), out_(open_or_throw(path)) {
  out_ << header << '\n';
  out_.flush();
}

void CsvWriter::row(const std::string& line) {
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::Io, "write failed on " + path_.string());
}

std::vector<std::filesystem::path> write_snapshot(const std::filesystem::path& stem, const DistributionField& F,
                                                  const RunConfig& config, int window, double time) {
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path meta = stem;
  meta += ".json";
  {
    std::ofstream out = open_or_throw(bin, std::ios::binary);
    for (double v : F.data().values()) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      unsigned char bytes[8];
      for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
  json j;
  j["format"] = "float64-le";
  j["layout"] = "x-major, v flat index (i * n + j) * n + k";
  j["n_x"] = F.n_x();
  j["n_v"] = F.n_v();
  j["n_per_axis"] = config.grid.n_per_axis;
  j["v_max"] = config.grid.v_max;
  j["domain_mode"] = std::string(to_string(config.grid.domain_mode));
  j["length"] = config.grid.length;
  j["delta"] = config.model.delta;
  j["rho"] = config.model.rho;
  j["window"] = window;
  j["time"] = time;
  j["data_file"] = bin.filename().string();
  open_or_throw(meta) << j.dump(2) << '\n';
  return {bin, meta};
}

std::filesystem::path write_manifest(const std::filesystem::path& out_dir, RunManifest manifest) {
  const std::filesystem::path path = out_dir / "manifest.json";
  manifest.files.push_back("manifest.json");
  json j;
  j["config_hash"] = manifest.config_hash;
  j["code_version"] = manifest.code_version;
  j["seed"] = manifest.seed;
  j["start_time"] = manifest.start_time;
  j["end_time"] = manifest.end_time;
  j["command"] = manifest.command;
  j["status"] = manifest.status;
  j["exit_code"] = manifest.exit_code;
  j["files"] = manifest.files;
  open_or_throw(path) << j.dump(2) << '\n';
  return path;
}

void write_reports(const std::filesystem::path& path, const std::vector<BoundReport>& reports) {
  json a = json::array();
  for (const auto& r : reports) {
    json o;
    o["id"] = r.id;
    o["samples"] = r.samples;
    o["worst_ratio"] = finite_or_null(r.worst_ratio);
    o["fitted_constant"] = finite_or_null(r.fitted_constant);
    o["pass"] = r.pass;
    o["seed"] = r.seed;
    o["detail"] = r.detail;
    json m = json::object();
    for (const auto& [k, v] : r.metrics) m[k] = finite_or_null(v);
    o["metrics"] = m;
    o["note"] = "pointwise quantities are maximised over every x node";
    a.push_back(o);
  }
  open_or_throw(path) << a.dump(2) << '\n';
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qkinetic::cli
