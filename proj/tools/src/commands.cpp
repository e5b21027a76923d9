#include "qkinetic_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "json.hpp"

#include "qkinetic/collision.hpp"
#include "qkinetic/config.hpp"
#include "qkinetic/equilibrium.hpp"
#include "qkinetic/error.hpp"
#include "qkinetic/parallel.hpp"
#include "qkinetic/solver.hpp"
#include "qkinetic/verifier.hpp"
#include "qkinetic_cli/io.hpp"

#ifndef QKINETIC_VERSION
#define QKINETIC_VERSION "unknown"
#endif

namespace qkinetic::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Loaded {
  RunConfig config;
  std::string hash;
};

Loaded load(const CommandOptions& o) {
  std::string text;
  try {
    text = read_text_file(o.config);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  Loaded l{parse_config(text), fnv1a_hex(text)};
  RunConfig& c = l.config;
  if (o.threads) c.threads = *o.threads;
  if (o.seed) c.seed = *o.seed;
  if (o.conservative_fix) c.solver.conservative_fix = true;
  if (o.snapshots) c.snapshots = true;
  if (o.kernel_cache_bytes) c.kernel_cache_bytes = *o.kernel_cache_bytes;
  if (o.sweep_axis) c.sweep.axis = parse_sweep_axis(*o.sweep_axis);
  c.threads = resolve_thread_count(c.threads);
  return l;
}

std::string relative_name(const fs::path& p, const fs::path& base) { return fs::relative(p, base).generic_string(); }

std::string csv_header() {
  return "window," + diagnostics_csv_header() + ",mass_drift,momentum_drift,energy_drift,picard_iterations";
}

std::string csv_row(const TrajectoryPoint& p, const DiagnosticsRecord& first) {
  const auto& r = p.record;
  const Vec3 dj = r.momentum_defect - first.momentum_defect;
  char buf[160];
  std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%d", std::abs(r.mass_defect - first.mass_defect), dj.norm(),
                std::abs(r.energy_defect - first.energy_defect), p.report.iterations);
  return std::to_string(p.window) + "," + diagnostics_csv_row(r) + buf;
}

struct RunSummary {
  std::size_t windows = 0;
  double max_mass_drift = 0.0;
  double max_momentum_drift = 0.0;
  double max_energy_drift = 0.0;
  double max_entropy_increase = 0.0;
  double final_time = 0.0;
  std::optional<DistributionField> final_field;
};

/// Runs time_march for one configuration. Rows go to `csv` with `prefix`
/// prepended; snapshot files are appended to `files`.
RunSummary execute_run(const RunConfig& c, const std::optional<DistributionField>& F0_override, CsvWriter& csv,
                       const std::string& prefix, const fs::path& out_dir, const std::string& snapshot_tag,
                       std::vector<std::string>& files, std::ostream& log) {
  const Grids g = build_grids(c.grid);
  CollisionOptions co;
  co.kernel_cache_bytes = c.kernel_cache_bytes;
  co.threads = c.threads;
  co.conservative_fix = c.solver.conservative_fix;
  const CollisionOperator op(c.model, g.velocity, g.sphere, co);

  DistributionField F0 = F0_override ? *F0_override
                                     : make_initial_data(c.initial, c.model, op.tables(), g.velocity, g.space);
  if (!F0_override && c.initial.kind == InitialDataConfig::Kind::Example) {
    const AdmissibilityReport rep = make_example_data(c.initial.phi, c.model, op.tables(), g.space).report;
    log << "example data: phi in [" << rep.phi_min << ", " << rep.phi_max << "], cap " << rep.cap << ", budget "
        << rep.budget << " (epsilon " << rep.epsilon << ")" << (rep.admissible ? "" : " -- NOT admissible") << '\n';
  }

  const PicardSolver solver(op, g.space, c.solver);
  RunSummary s;
  std::optional<DiagnosticsRecord> first;
  double previous_entropy = 0.0;
  if (c.snapshots) fs::create_directories(out_dir / "snapshots");
  auto observer = [&](const TrajectoryPoint& p) {
    if (!first) first = p.record;
    else s.max_entropy_increase = std::max(s.max_entropy_increase, p.record.entropy - previous_entropy);
    previous_entropy = p.record.entropy;
    csv.row(prefix + csv_row(p, *first));
    s.windows = static_cast<std::size_t>(p.window);
    s.final_time = p.time;
    s.max_mass_drift = std::max(s.max_mass_drift, std::abs(p.record.mass_defect - first->mass_defect));
    s.max_momentum_drift =
        std::max(s.max_momentum_drift, (p.record.momentum_defect - first->momentum_defect).norm());
    s.max_energy_drift = std::max(s.max_energy_drift, std::abs(p.record.energy_defect - first->energy_defect));
    if (c.snapshots) {
      char name[64];
      std::snprintf(name, sizeof name, "field%s_w%04d", snapshot_tag.c_str(), p.window);
      for (const auto& f : write_snapshot(out_dir / "snapshots" / name, p.field, c, p.window, p.time))
        files.push_back(relative_name(f, out_dir));
    }
    log << prefix << "window " << p.window << " t=" << p.time << " iterations=" << p.report.iterations
        << " H=" << p.record.entropy << '\n';
  };
  Trajectory traj = solver.time_march(F0, observer);
  s.final_field = traj.back().field;
  return s;
}

int report_error(const Error& e, std::ostream& log) {
  log << "error: " << e.what() << '\n';
  switch (e.code()) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidParameter:
    case ErrorCode::EvenNodeCount:
    case ErrorCode::NonPositiveSize:
    case ErrorCode::OddAzimuthCount: return kExitConfig;
    default: return kExitSolver;
  }
}

// Anything that goes wrong while reading the configuration, including an
// unreadable file, is a configuration error.
int config_error(const Error& e, std::ostream& log) {
  log << "error: " << e.what() << '\n';
  return kExitConfig;
}

RunManifest start_manifest(const Loaded& l, const std::string& command) {
  RunManifest m;
  m.config_hash = l.hash;
  m.code_version = QKINETIC_VERSION;
  m.seed = l.config.seed;
  m.start_time = utc_now();
  m.command = command;
  return m;
}

int finish(const fs::path& out_dir, RunManifest m, int code, const std::string& status) {
  m.end_time = utc_now();
  m.exit_code = code;
  m.status = status;
  write_manifest(out_dir, std::move(m));
  return code;
}

}  // namespace

int cmd_run(const CommandOptions& options, std::ostream& log) {
  Loaded l;
  try {
    l = load(options);
  } catch (const Error& e) {
    return config_error(e, log);
  }
  const fs::path out = options.out_dir;
  fs::create_directories(out);
  RunManifest m = start_manifest(l, "run");
  try {
    CsvWriter csv(out / "diagnostics.csv", csv_header());
    m.files.push_back("diagnostics.csv");
    try {
      execute_run(l.config, std::nullopt, csv, "", out, "", m.files, log);
    } catch (const MarchFailure& e) {
      log << "solver failure: " << e.what() << " (" << e.partial().size() << " points written)\n";
      return finish(out, std::move(m), kExitSolver, "solver_failure");
    }
  } catch (const Error& e) {
    const int code = report_error(e, log);
    return finish(out, std::move(m), code, code == kExitConfig ? "config_error" : "solver_failure");
  }
  return finish(out, std::move(m), kExitOk, "ok");
}

int cmd_verify(const CommandOptions& options, std::ostream& log) {
  Loaded l;
  try {
    l = load(options);
  } catch (const Error& e) {
    return config_error(e, log);
  }
  const RunConfig& c = l.config;
  VerificationPlan plan;
  plan.checks = c.verify.checks ? *c.verify.checks : known_check_ids();
  plan.deltas = c.verify.deltas;
  plan.rhos = c.verify.rhos;
  plan.base = c.model;
  plan.grid = c.grid;
  plan.grid.domain_mode = DomainMode::Homogeneous;
  plan.grid.n_x = 1;
  plan.pair.coarse = plan.grid;
  plan.pair.coarse.n_per_axis = c.verify.coarse_n;
  plan.pair.fine = plan.grid;
  plan.pair.fine.n_per_axis = c.verify.fine_n;
  plan.contraction_grid = plan.grid;
  plan.contraction_grid.n_per_axis = c.verify.contraction_n;
  plan.solver = c.solver;
  plan.bump = c.initial.bump;
  plan.samples = c.verify.samples;
  plan.fields = c.verify.fields;
  plan.residual_fields = c.verify.residual_fields;
  plan.seed = c.seed;
  plan.threads = c.threads;
  plan.hooks = c.test_hooks;
  if (plan.checks.empty()) {
    log << "error: empty check list, nothing to verify\n";
    return kExitConfig;
  }

  const fs::path out = options.out_dir;
  fs::create_directories(out);
  RunManifest m = start_manifest(l, "verify");
  std::vector<BoundReport> reports;
  try {
    reports = run_verification(plan);
  } catch (const Error& e) {
    write_reports(out / "verify_report.json", reports);
    m.files.push_back("verify_report.json");
    const int code = report_error(e, log);
    return finish(out, std::move(m), code, "error");
  }
  write_reports(out / "verify_report.json", reports);
  m.files.push_back("verify_report.json");
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.pass;
    log << (r.pass ? "PASS " : "FAIL ") << r.id << " worst_ratio=" << r.worst_ratio
        << " fitted=" << r.fitted_constant << " " << r.detail << '\n';
  }
  return finish(out, std::move(m), all ? kExitOk : kExitVerification, all ? "ok" : "verification_failed");
}

int cmd_sweep(const CommandOptions& options, std::ostream& log) {
  Loaded l;
  try {
    l = load(options);
    if (!l.config.sweep.axis) throw Error(ErrorCode::InvalidConfig, "sweep needs an axis");
    if (l.config.sweep.values.empty()) throw Error(ErrorCode::InvalidConfig, "sweep.values must not be empty");
    if (*l.config.sweep.axis == SweepAxis::Delta) {
      for (double d : l.config.sweep.values)
        if (!(d >= 0.0 && d <= 1.0)) throw Error(ErrorCode::InvalidConfig, "delta sweep values must lie in [0, 1]");
    }
    if (*l.config.sweep.axis == SweepAxis::Resolution) {
      for (double n : l.config.sweep.values)
        if (n != std::floor(n) || n < 3 || static_cast<long>(n) % 2 == 0)
          throw Error(ErrorCode::InvalidConfig, "resolution sweep values must be odd integers >= 3");
    }
  } catch (const Error& e) {
    return config_error(e, log);
  }
  const RunConfig& base = l.config;
  const SweepAxis axis = *base.sweep.axis;
  const fs::path out = options.out_dir;
  fs::create_directories(out);
  RunManifest m = start_manifest(l, "sweep");

  // A delta sweep starts every run from the same F0, built at the largest
  // delta so it respects every Pauli cap.
  std::optional<DistributionField> common;
  if (axis == SweepAxis::Delta) {
    try {
      RunConfig c = base;
      c.model.delta = *std::max_element(base.sweep.values.begin(), base.sweep.values.end());
      const Grids g = build_grids(c.grid);
      const EquilibriumTables t = build_tables(g.velocity, c.model);
      common = make_initial_data(c.initial, c.model, t, g.velocity, g.space);
    } catch (const Error& e) {
      const int code = report_error(e, log);
      return finish(out, std::move(m), code, "config_error");
    }
  }

  CsvWriter csv(out / "sweep.csv", std::string(to_string(axis)) + "," + csv_header());
  m.files.push_back("sweep.csv");
  json summary;
  summary["axis"] = std::string(to_string(axis));
  summary["runs"] = json::array();
  std::vector<std::pair<double, DistributionField>> finals;
  bool all_ok = true;
  for (double value : base.sweep.values) {
    RunConfig c = base;
    switch (axis) {
      case SweepAxis::Delta: c.model.delta = value; break;
      case SweepAxis::Rho: c.model.rho = value; break;
      case SweepAxis::Gamma: c.model.gamma = value; break;
      case SweepAxis::Resolution: c.grid.n_per_axis = static_cast<int>(value); break;
    }
    char prefix[64];
    std::snprintf(prefix, sizeof prefix, "%.17g,", value);
    char tag[64];
    std::snprintf(tag, sizeof tag, "_%s%g", std::string(to_string(axis)).c_str(), value);
    json run;
    run["value"] = value;
    try {
      std::optional<DistributionField> F0;
      if (common) F0 = DistributionField(common->data(), value);
      RunSummary s = execute_run(c, F0, csv, prefix, out, tag, m.files, log);
      run["status"] = "ok";
      run["windows"] = s.windows;
      run["final_time"] = s.final_time;
      run["max_mass_drift"] = s.max_mass_drift;
      run["max_momentum_drift"] = s.max_momentum_drift;
      run["max_energy_drift"] = s.max_energy_drift;
      run["max_entropy_increase"] = s.max_entropy_increase;
      if (s.final_field) finals.emplace_back(value, std::move(*s.final_field));
    } catch (const Error& e) {
      all_ok = false;
      run["status"] = "failed";
      run["error"] = e.what();
      log << "run " << value << " failed: " << e.what() << '\n';
    }
    summary["runs"].push_back(run);
  }

  if (axis == SweepAxis::Delta && finals.size() >= 3) {
    // Slope of max|F_delta - F_ref| at the final time against delta - delta_ref.
    std::sort(finals.begin(), finals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto& [d0, ref] = finals.front();
    std::vector<double> xs, ys;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 1; i < finals.size(); ++i) {
      const auto& F = finals[i].second;
      if (!F.data().same_shape(ref.data())) continue;
      double diff = 0.0;
      for (std::size_t k = 0; k < F.data().size(); ++k)
        diff = std::max(diff, std::abs(F.data().values()[k] - ref.data().values()[k]));
      const double dx = finals[i].first - d0;
      if (!(diff > 0.0) || !(dx > 0.0)) continue;
      xs.push_back(dx);
      ys.push_back(diff);
      const double lx = std::log(dx), ly = std::log(diff);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    json limit;
    limit["reference_delta"] = d0;
    limit["delta_offsets"] = xs;
    limit["final_field_differences"] = ys;
    const double n = static_cast<double>(xs.size());
    if (xs.size() >= 2) limit["slope"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    else limit["slope"] = nullptr;
    summary["delta_limit"] = limit;
  }

  {
    std::ofstream s(out / "sweep_summary.json");
    s << summary.dump(2) << '\n';
  }
  m.files.push_back("sweep_summary.json");
  return finish(out, std::move(m), all_ok ? kExitOk : kExitSolver, all_ok ? "ok" : "partial_failure");
}

}  // namespace qkinetic::cli
