#include "qkinetic/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "qkinetic/equilibrium.hpp"
#include "qkinetic/error.hpp"

namespace qkinetic {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorCode::InvalidConfig, message); }

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where + " must be a JSON object");
}

void require_known_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> keys) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) bad("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + " has the wrong type");
  }
}

void read_number(const json& j, const char* key, double& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) bad(where + "." + key + " must be a number");
  out = j.at(key).get<double>();
}

void read_int(const json& j, const char* key, int& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) bad(where + "." + key + " must be an integer");
  out = j.at(key).get<int>();
}

void read_numbers(const json& j, const char* key, std::vector<double>& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array()) bad(where + "." + key + " must be an array of numbers");
  out.clear();
  for (const auto& x : a) {
    if (!x.is_number()) bad(where + "." + key + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
}

Vec3 read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where + " must be an array of three numbers");
  Vec3 v;
  double* c[3] = {&v.x, &v.y, &v.z};
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) bad(where + " must be an array of three numbers");
    *c[i] = j[i].get<double>();
  }
  return v;
}

void parse_model(const json& j, ModelParams& m) {
  require_object(j, "model");
  require_known_keys(j, "model", {"delta", "rho", "gamma", "beta", "angular_coefficient"});
  read_number(j, "delta", m.delta, "model");
  read_number(j, "rho", m.rho, "model");
  read_number(j, "gamma", m.gamma, "model");
  read_number(j, "beta", m.beta, "model");
  read_number(j, "angular_coefficient", m.angular_law.coefficient, "model");
}

void parse_grid(const json& j, GridConfig& g) {
  require_object(j, "grid");
  require_known_keys(j, "grid",
                     {"v_max", "n_per_axis", "sphere_polar", "sphere_azimuth", "domain_mode", "n_x", "length"});
  read_number(j, "v_max", g.v_max, "grid");
  read_int(j, "n_per_axis", g.n_per_axis, "grid");
  read_int(j, "sphere_polar", g.sphere_polar, "grid");
  read_int(j, "sphere_azimuth", g.sphere_azimuth, "grid");
  if (j.contains("domain_mode")) {
    if (!j.at("domain_mode").is_string()) bad("grid.domain_mode must be a string");
    try {
      g.domain_mode = parse_domain_mode(j.at("domain_mode").get<std::string>());
    } catch (const Error& e) {
      bad(e.what());
    }
  }
  read_int(j, "n_x", g.n_x, "grid");
  read_number(j, "length", g.length, "grid");
}

void parse_solver(const json& j, SolverConfig& s) {
  require_object(j, "solver");
  require_known_keys(j, "solver",
                     {"dt", "picard_tol", "picard_max_iters", "t_end", "max_windows", "horizon_constant", "substeps",
                      "conservative_fix", "track_companion", "clamp_tolerance"});
  if (j.contains("dt")) {
    if (j.at("dt").is_null()) {
      s.dt.reset();
    } else {
      double dt = 0.0;
      read_number(j, "dt", dt, "solver");
      s.dt = dt;
    }
  }
  read_number(j, "picard_tol", s.picard_tol, "solver");
  read_int(j, "picard_max_iters", s.picard_max_iters, "solver");
  read_number(j, "t_end", s.t_end, "solver");
  read_int(j, "max_windows", s.max_windows, "solver");
  read_number(j, "horizon_constant", s.horizon_constant, "solver");
  read_int(j, "substeps", s.substeps, "solver");
  read(j, "conservative_fix", s.conservative_fix, "solver");
  read(j, "track_companion", s.track_companion, "solver");
  read_number(j, "clamp_tolerance", s.clamp_tolerance, "solver");
}

void parse_initial(const json& j, InitialDataConfig& init) {
  require_object(j, "initial");
  require_known_keys(j, "initial", {"kind", "phi", "bump"});
  if (j.contains("kind")) {
    if (!j.at("kind").is_string()) bad("initial.kind must be a string");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "equilibrium") init.kind = InitialDataConfig::Kind::Equilibrium;
    else if (kind == "example") init.kind = InitialDataConfig::Kind::Example;
    else if (kind == "bump") init.kind = InitialDataConfig::Kind::Bump;
    else bad("initial.kind must be one of equilibrium, example, bump");
  }
  if (j.contains("phi")) {
    const json& p = j.at("phi");
    require_object(p, "initial.phi");
    require_known_keys(p, "initial.phi", {"kind", "value", "amplitude", "M", "epsilon"});
    if (p.contains("kind")) {
      if (!p.at("kind").is_string()) bad("initial.phi.kind must be a string");
      const std::string kind = p.at("kind").get<std::string>();
      if (kind == "constant") init.phi.kind = PhiSpec::Kind::Constant;
      else if (kind == "cosine") init.phi.kind = PhiSpec::Kind::Cosine;
      else bad("initial.phi.kind must be constant or cosine");
    }
    read_number(p, "value", init.phi.value, "initial.phi");
    read_number(p, "amplitude", init.phi.amplitude, "initial.phi");
    if (p.contains("M")) {
      double m = 0.0;
      read_number(p, "M", m, "initial.phi");
      init.phi.big_m = m;
    }
    read_number(p, "epsilon", init.phi.epsilon, "initial.phi");
  }
  if (j.contains("bump")) {
    const json& b = j.at("bump");
    require_object(b, "initial.bump");
    require_known_keys(b, "initial.bump", {"amplitude", "centre", "width", "modulation"});
    read_number(b, "amplitude", init.bump.amplitude, "initial.bump");
    if (b.contains("centre")) init.bump.centre = read_vec3(b.at("centre"), "initial.bump.centre");
    read_number(b, "width", init.bump.width, "initial.bump");
    read_number(b, "modulation", init.bump.modulation, "initial.bump");
  }
}

void parse_verify(const json& j, VerifyConfig& v) {
  require_object(j, "verify");
  require_known_keys(j, "verify",
                     {"checks", "deltas", "rhos", "samples", "fields", "residual_fields", "coarse_n", "fine_n",
                      "contraction_n"});
  if (j.contains("checks")) {
    std::vector<std::string> checks;
    read(j, "checks", checks, "verify");
    v.checks = std::move(checks);
  }
  read_numbers(j, "deltas", v.deltas, "verify");
  read_numbers(j, "rhos", v.rhos, "verify");
  read(j, "samples", v.samples, "verify");
  read(j, "fields", v.fields, "verify");
  read(j, "residual_fields", v.residual_fields, "verify");
  read_int(j, "coarse_n", v.coarse_n, "verify");
  read_int(j, "fine_n", v.fine_n, "verify");
  read_int(j, "contraction_n", v.contraction_n, "verify");
}

void parse_sweep(const json& j, SweepConfig& s) {
  require_object(j, "sweep");
  require_known_keys(j, "sweep", {"axis", "values"});
  if (j.contains("axis")) {
    if (!j.at("axis").is_string()) bad("sweep.axis must be a string");
    s.axis = parse_sweep_axis(j.at("axis").get<std::string>());
  }
  read_numbers(j, "values", s.values, "sweep");
}

void validate_config(const RunConfig& c) {
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidConfig) throw;
      bad(e.what());
    }
  };
  wrap([&] { c.model.validate(); });
  wrap([&] { (void)build_grids(c.grid); });
  wrap([&] { c.solver.validate(); });
  if (!(c.cutoff_m >= 0.0 && c.cutoff_m <= 1.0)) bad("cutoff_m must lie in [0, 1]");
  if (c.grid.domain_mode != c.model.domain_mode) bad("grid.domain_mode and model domain mode disagree");
  if (c.initial.kind == InitialDataConfig::Kind::Bump && !(c.initial.bump.width > 0.0))
    bad("initial.bump.width must be positive");
  for (double d : c.verify.deltas)
    if (!(d >= 0.0 && d <= 1.0)) bad("verify.deltas must lie in [0, 1]");
  for (double r : c.verify.rhos)
    if (!(r > 0.0)) bad("verify.rhos must be positive");
  if (c.verify.samples < 1000) bad("verify.samples must be at least 1000");
  if (c.verify.fields < 1 || c.verify.residual_fields < 1) bad("verify field counts must be positive");
  for (int n : {c.verify.coarse_n, c.verify.fine_n, c.verify.contraction_n})
    if (n < 3 || n % 2 == 0) bad("verify grid sizes must be odd and at least 3");
  if (c.sweep.axis && c.sweep.values.empty()) bad("sweep.values must not be empty");
}

}  // namespace

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "delta") return SweepAxis::Delta;
  if (name == "rho") return SweepAxis::Rho;
  if (name == "gamma") return SweepAxis::Gamma;
  if (name == "resolution") return SweepAxis::Resolution;
  bad("sweep axis must be one of delta, rho, gamma, resolution; got '" + std::string(name) + "'");
}

std::string_view to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::Delta: return "delta";
    case SweepAxis::Rho: return "rho";
    case SweepAxis::Gamma: return "gamma";
    case SweepAxis::Resolution: return "resolution";
  }
  return "unknown";
}

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  require_object(root, "configuration");
  require_known_keys(root, "configuration",
                     {"model", "grid", "solver", "initial", "cutoff_m", "seed", "threads", "kernel_cache_bytes",
                      "snapshots", "verify", "sweep", "test_hooks"});
  RunConfig c;
  if (root.contains("model")) parse_model(root.at("model"), c.model);
  if (root.contains("grid")) parse_grid(root.at("grid"), c.grid);
  c.model.domain_mode = c.grid.domain_mode;
  if (root.contains("solver")) parse_solver(root.at("solver"), c.solver);
  if (root.contains("initial")) parse_initial(root.at("initial"), c.initial);
  read_number(root, "cutoff_m", c.cutoff_m, "configuration");
  read(root, "seed", c.seed, "configuration");
  read(root, "threads", c.threads, "configuration");
  read(root, "kernel_cache_bytes", c.kernel_cache_bytes, "configuration");
  read(root, "snapshots", c.snapshots, "configuration");
  if (root.contains("verify")) parse_verify(root.at("verify"), c.verify);
  if (root.contains("sweep")) parse_sweep(root.at("sweep"), c.sweep);
  if (root.contains("test_hooks")) {
    const json& h = root.at("test_hooks");
    require_object(h, "test_hooks");
    require_known_keys(h, "test_hooks", {"flip_third_k_term"});
    read(h, "flip_third_k_term", c.test_hooks.flip_third_k_term, "test_hooks");
  }
  validate_config(c);
  return c;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    bad(e.what());
  }
  return parse_config(text);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DistributionField make_initial_data(const InitialDataConfig& initial, const ModelParams& params,
                                    const EquilibriumTables& tables, const VelocityGrid& vgrid,
                                    const SpatialGrid& xgrid) {
  switch (initial.kind) {
    case InitialDataConfig::Kind::Equilibrium: return equilibrium_field(tables, xgrid.size());
    case InitialDataConfig::Kind::Example: return make_example_data(initial.phi, params, tables, xgrid).field;
    case InitialDataConfig::Kind::Bump: return make_bump_data(initial.bump, tables, vgrid, xgrid);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown initial data kind");
}

}  // namespace qkinetic
