#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkinetic/diagnostics.hpp"
#include "qkinetic/grid.hpp"
#include "qkinetic/linearized.hpp"
#include "qkinetic/params.hpp"
#include "qkinetic/solver.hpp"

namespace qkinetic {

struct InitialDataConfig {
  enum class Kind { Equilibrium, Example, Bump };
  Kind kind = Kind::Equilibrium;
  PhiSpec phi;    ///< Example: F0 = phi(x) mu(v)
  BumpSpec bump;  ///< Bump: mu plus a Gaussian bump
};

struct VerifyConfig {
  /// Absent: every known check. Present but empty: nothing to verify.
  std::optional<std::vector<std::string>> checks;
  std::vector<double> deltas{0.0, 0.5, 1.0};
  std::vector<double> rhos{0.5, 1.0, 2.0};
  std::size_t samples = 100000;   ///< random triples of the product-bound check
  std::size_t fields = 24;        ///< random fields of the nonlinear estimate
  std::size_t residual_fields = 4;  ///< random fields of decomposition and splitting
  int coarse_n = 9;
  int fine_n = 17;
  int contraction_n = 9;
};

enum class SweepAxis { Delta, Rho, Gamma, Resolution };
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis) noexcept;

struct SweepConfig {
  std::optional<SweepAxis> axis;
  std::vector<double> values;
};

struct RunConfig {
  ModelParams model;
  GridConfig grid;
  SolverConfig solver;
  InitialDataConfig initial;
  double cutoff_m = 0.5;
  std::uint64_t seed = 1;
  unsigned threads = 0;  ///< 0: QKINETIC_THREADS or hardware concurrency
  std::size_t kernel_cache_bytes = std::size_t{1} << 30;
  bool snapshots = false;
  VerifyConfig verify;
  SweepConfig sweep;
  LinearizedOptions test_hooks;
};

/// Parses and validates a JSON configuration. Missing keys keep their
/// defaults; unknown keys, wrong types and invalid values throw
/// Error(InvalidConfig).
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Reads a whole file; throws Error(Io).
std::string read_text_file(const std::filesystem::path& path);

/// 64-bit FNV-1a of the given bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Builds the initial datum described by the configuration.
DistributionField make_initial_data(const InitialDataConfig& initial, const ModelParams& params,
                                    const EquilibriumTables& tables, const VelocityGrid& vgrid,
                                    const SpatialGrid& xgrid);

}  // namespace qkinetic
