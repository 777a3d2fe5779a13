#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "granular/collision.hpp"
#include "granular/diagnostics.hpp"
#include "granular/error.hpp"
#include "granular/integrator.hpp"

namespace granular {

// ---------------------------------------------------------------------------
// Configuration
//
// One INI document, schema version 1:
//
//   version = 1
//   [grid]        d, n, s, r (opt), l (opt)
//   [kernel]      preset (maxwell_2d | hard_spheres_2d | hard_spheres_3d), lambda, c_lambda, gamma
//   [restitution] model (constant | tanh | toscani | viscoelastic), e, e0, c, gamma_t, a
//   [initial]     kind (maxwellian2d | flat2d | maxwellian3d), rho0, u0 ("ux uy [uz]"), t0, w0
//   [solver]      tau, dt, t_final, method (fast | direct), output_every, snapshot_every, stop_at_steady
//   [quadrature]  n_rho, m_angular
//   [run]         out, memory_budget_gb, cache, collisions
//
// Unknown sections or keys are a SchemaError naming the key path.

struct RunConfig {
  Problem problem;
  SolverConfig solver;
  std::filesystem::path out_dir = "out";
  double memory_budget_bytes = 8e9;
  bool use_cache = false;
};

inline constexpr int kConfigVersion = 1;

namespace detail {

using boost::property_tree::ptree;

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"grid", {"d", "n", "s", "r", "l"}},
      {"kernel", {"preset", "lambda", "c_lambda", "gamma"}},
      {"restitution", {"model", "e", "e0", "c", "gamma_t", "a"}},
      {"initial", {"kind", "rho0", "u0", "t0", "w0"}},
      {"solver", {"tau", "dt", "t_final", "method", "output_every", "snapshot_every", "stop_at_steady"}},
      {"quadrature", {"n_rho", "m_angular"}},
      {"run", {"out", "memory_budget_gb", "cache", "collisions"}},
  };
  return schema;
}

template <class T>
T get_value(const ptree& section, const std::string& path, const std::string& key, T fallback) {
  const auto child = section.get_child_optional(key);
  if (!child) return fallback;
  const std::string text = child->get_value<std::string>();
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error(Errc::SchemaError, path + "." + key + ": expected a boolean, got '" + text + "'");
  } else {
    std::istringstream in(text);
    T value{};
    if (!(in >> value) || !(in >> std::ws).eof()) {
      throw Error(Errc::SchemaError, path + "." + key + ": cannot parse '" + text + "'");
    }
    return value;
  }
}

template <class T>
T require_value(const ptree& section, const std::string& path, const std::string& key) {
  if (!section.get_child_optional(key)) throw Error(Errc::SchemaError, path + "." + key + ": required key is missing");
  return get_value<T>(section, path, key, T{});
}

inline std::vector<double> parse_vector(const std::string& path, const std::string& text, std::size_t count) {
  std::istringstream in(text);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  if (!in.eof() || out.size() != count) {
    throw Error(Errc::SchemaError, path + ": expected " + std::to_string(count) + " numbers, got '" + text + "'");
  }
  return out;
}

// Runs a validation step and reports its failure as a ConstraintError.
template <class Fn>
void constraint(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == Errc::SchemaError) throw;
    throw Error(Errc::ConstraintError, path + ": " + e.what());
  }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using detail::ptree;
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(Errc::SchemaError, std::string("malformed config: ") + e.message() + " (line " +
                                       std::to_string(e.line()) + ")");
  }
  const auto& schema = detail::config_schema();
  for (const auto& [name, child] : root) {
    const auto it = schema.find(name);
    if (child.empty() && it == schema.end()) {
      if (name != "version") throw Error(Errc::SchemaError, name + ": unknown key");
      continue;
    }
    if (it == schema.end()) throw Error(Errc::SchemaError, name + ": unknown section");
    for (const auto& [key, value] : child) {
      if (!it->second.count(key)) throw Error(Errc::SchemaError, name + "." + key + ": unknown key");
    }
  }
  const int version = detail::require_value<int>(root, "", "version");
  if (version != kConfigVersion) {
    throw Error(Errc::SchemaError, "version: unsupported config version " + std::to_string(version));
  }
  auto section = [&](const std::string& name) -> const ptree& {
    static const ptree empty;
    const auto c = root.get_child_optional(name);
    return c ? *c : empty;
  };

  RunConfig cfg;
  Problem& p = cfg.problem;

  const ptree& grid = section("grid");
  const int d = detail::get_value<int>(grid, "grid", "d", 2);
  const int n = detail::require_value<int>(grid, "grid", "n");
  const double s = detail::require_value<double>(grid, "grid", "s");
  GridOverrides ov;
  if (grid.get_child_optional("r")) ov.r = detail::get_value<double>(grid, "grid", "r", 0.0);
  if (grid.get_child_optional("l")) ov.l = detail::get_value<double>(grid, "grid", "l", 0.0);
  detail::constraint("grid", [&] { p.grid = make_grid(d, n, s, ov); });

  const ptree& kernel = section("kernel");
  const std::string preset = detail::get_value<std::string>(kernel, "kernel", "preset", "");
  if (preset == "maxwell_2d") {
    p.kernel = KernelSpec::maxwell_2d();
  } else if (preset == "hard_spheres_2d") {
    p.kernel = KernelSpec::hard_spheres_2d();
  } else if (preset == "hard_spheres_3d") {
    p.kernel = KernelSpec::hard_spheres_3d();
  } else if (!preset.empty()) {
    throw Error(Errc::SchemaError, "kernel.preset: unknown preset '" + preset + "'");
  } else {
    p.kernel = {0.0, 1.0 / sphere_area(d), 0.0};
  }
  p.kernel.lambda = detail::get_value<double>(kernel, "kernel", "lambda", p.kernel.lambda);
  p.kernel.c_lambda = detail::get_value<double>(kernel, "kernel", "c_lambda", p.kernel.c_lambda);
  p.kernel.gamma = detail::get_value<double>(kernel, "kernel", "gamma", p.kernel.gamma);
  detail::constraint("kernel", [&] { validate(p.kernel); });

  const ptree& rest = section("restitution");
  const std::string model = detail::get_value<std::string>(rest, "restitution", "model", "constant");
  if (model == "constant") {
    p.restitution = ConstantRestitution{detail::get_value<double>(rest, "restitution", "e", 1.0)};
  } else if (model == "tanh") {
    p.restitution = TanhRestitution{detail::require_value<double>(rest, "restitution", "e0")};
  } else if (model == "toscani") {
    p.restitution = ToscaniRestitution{detail::require_value<double>(rest, "restitution", "c"),
                                       detail::get_value<double>(rest, "restitution", "gamma_t", 1.0)};
  } else if (model == "viscoelastic") {
    p.restitution = ViscoelasticRestitution{detail::require_value<double>(rest, "restitution", "a")};
  } else {
    throw Error(Errc::SchemaError, "restitution.model: unknown model '" + model + "'");
  }
  detail::constraint("restitution", [&] { validate(p.restitution); });

  const ptree& init = section("initial");
  const std::string kind = detail::get_value<std::string>(init, "initial", "kind", d == 2 ? "maxwellian2d" : "maxwellian3d");
  const double rho0 = detail::get_value<double>(init, "initial", "rho0", 1.0);
  const double t0 = detail::get_value<double>(init, "initial", "t0", 1.0);
  const std::string u0 = detail::get_value<std::string>(init, "initial", "u0", "");
  if (kind == "maxwellian2d") {
    Maxwellian2D m{rho0, {0.0, 0.0}, t0};
    if (!u0.empty()) {
      const auto v = detail::parse_vector("initial.u0", u0, 2);
      m.u0 = {v[0], v[1]};
    }
    p.ic = m;
  } else if (kind == "maxwellian3d") {
    Maxwellian3D m{rho0, {0.0, 0.0, 0.0}, t0};
    if (!u0.empty()) {
      const auto v = detail::parse_vector("initial.u0", u0, 3);
      m.u0 = {v[0], v[1], v[2]};
    }
    p.ic = m;
  } else if (kind == "flat2d") {
    p.ic = Flat2D{detail::require_value<double>(init, "initial", "w0")};
  } else {
    throw Error(Errc::SchemaError, "initial.kind: unknown kind '" + kind + "'");
  }
  detail::constraint("initial", [&] {
    if (dimension_of(p.ic) != d) throw Error(Errc::DimensionMismatch, "initial condition dimension differs from grid.d");
    if (!(rho0 > 0.0) || !(t0 > 0.0)) throw Error(Errc::InvalidParameter, "rho0 and t0 must be positive");
    if (const auto* f = std::get_if<Flat2D>(&p.ic); f && !(f->w0 > 0.0)) {
      throw Error(Errc::InvalidParameter, "w0 must be positive");
    }
  });

  const ptree& solver = section("solver");
  SolverConfig& sc = cfg.solver;
  sc.tau = detail::get_value<double>(solver, "solver", "tau", 0.0);
  sc.dt = detail::get_value<double>(solver, "solver", "dt", 0.01);
  sc.t_final = detail::require_value<double>(solver, "solver", "t_final");
  const std::string method = detail::get_value<std::string>(solver, "solver", "method", "fast");
  if (method == "fast") {
    sc.method = Method::Fast;
  } else if (method == "direct") {
    sc.method = Method::Direct;
  } else {
    throw Error(Errc::SchemaError, "solver.method: expected fast or direct, got '" + method + "'");
  }
  sc.output_every = detail::get_value<int>(solver, "solver", "output_every", 10);
  sc.snapshot_every = detail::get_value<int>(solver, "solver", "snapshot_every", 0);
  sc.stop_at_steady = detail::get_value<bool>(solver, "solver", "stop_at_steady", false);
  detail::constraint("solver", [&] { validate(sc); });

  const ptree& quad = section("quadrature");
  p.n_rho = detail::get_value<int>(quad, "quadrature", "n_rho", n);
  p.m_angular = detail::get_value<int>(quad, "quadrature", "m_angular", d == 2 ? 16 : 32);
  detail::constraint("quadrature", [&] { collision_model(p); });

  const ptree& run_s = section("run");
  cfg.out_dir = detail::get_value<std::string>(run_s, "run", "out", "out");
  cfg.memory_budget_bytes = 1e9 * detail::get_value<double>(run_s, "run", "memory_budget_gb", 8.0);
  cfg.use_cache = detail::get_value<bool>(run_s, "run", "cache", false);
  p.collisions = detail::get_value<bool>(run_s, "run", "collisions", true);
  detail::constraint("run", [&] {
    if (!(cfg.memory_budget_bytes > 0.0)) throw Error(Errc::InvalidParameter, "memory budget must be positive");
  });
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Snapshots: "GGS1", u32 version = 1, u32 d, u32 N, f64 L, then N^d f64
// values, all little-endian, row-major.

struct SnapshotData {
  int d = 0;
  int n = 0;
  double l = 0.0;
  std::vector<double> values;
};

inline constexpr char kSnapshotMagic[4] = {'G', 'G', 'S', '1'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeader = 4 + 4 + 4 + 4 + 8;

namespace detail {

inline void check_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto probe = dir / ".granular-write-probe";
  std::ofstream out(probe);
  if (ec || !out) throw Error(Errc::IoError, "output directory " + dir.string() + " is not writable");
  out.close();
  std::filesystem::remove(probe, ec);
}

// Writes through a sibling temporary file and renames it into place, so a
// failed write never leaves a partial file behind.
template <class Writer>
void write_atomically(const std::filesystem::path& path, std::ios::openmode mode, Writer&& writer) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, mode | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    writer(out);
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(Errc::IoError, "short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline void write_snapshot(const std::filesystem::path& path, const GridSpec& g, std::span<const double> values) {
  static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");
  if (values.size() != g.size()) throw Error(Errc::GridMismatch, "snapshot values do not match the grid");
  detail::write_atomically(path, std::ios::binary, [&](std::ostream& out) {
    const std::uint32_t header[3] = {kSnapshotVersion, static_cast<std::uint32_t>(g.d), static_cast<std::uint32_t>(g.n)};
    out.write(kSnapshotMagic, 4);
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(&g.l), sizeof g.l);
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  });
}

inline SnapshotData read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open snapshot " + path.string());
  char magic[4];
  std::uint32_t header[3];
  SnapshotData s;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(&s.l), sizeof s.l);
  if (!in) throw Error(Errc::CorruptSnapshot, path.string() + ": truncated header");
  if (std::memcmp(magic, kSnapshotMagic, 4) != 0) throw Error(Errc::CorruptSnapshot, path.string() + ": bad magic");
  if (header[0] != kSnapshotVersion) {
    throw Error(Errc::CorruptSnapshot, path.string() + ": unsupported version " + std::to_string(header[0]));
  }
  s.d = static_cast<int>(header[1]);
  s.n = static_cast<int>(header[2]);
  if ((s.d != 2 && s.d != 3) || s.n < 1 || s.n > 1 << 14) {
    throw Error(Errc::CorruptSnapshot, path.string() + ": implausible shape");
  }
  std::size_t count = 1;
  for (int a = 0; a < s.d; ++a) count *= static_cast<std::size_t>(s.n);
  if (std::filesystem::file_size(path) != kSnapshotHeader + count * sizeof(double)) {
    throw Error(Errc::CorruptSnapshot, path.string() + ": payload length does not match N^d");
  }
  s.values.resize(count);
  in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw Error(Errc::CorruptSnapshot, path.string() + ": truncated payload");
  return s;
}

/// Field on a grid rebuilt from a snapshot. S and R are not stored; S is
/// set to the largest support the box admits, R to 2S.
inline DistributionField field_from_snapshot(const SnapshotData& s) {
  GridSpec g{s.d, s.n, s.l * 2.0 / (3.0 + std::numbers::sqrt2), 0.0, s.l};
  g.r = 2.0 * g.s;
  DistributionField f(g);
  std::copy(s.values.begin(), s.values.end(), f.values().begin());
  to_spectral(f);
  return f;
}

// ---------------------------------------------------------------------------
// Time series CSV: t, rho, ux, uy[, uz], T, E, entropy, step_l2_diff, min_f.

inline std::string series_header(int d) {
  return d == 2 ? "t,rho,ux,uy,T,E,entropy,step_l2_diff,min_f" : "t,rho,ux,uy,uz,T,E,entropy,step_l2_diff,min_f";
}

inline std::string format_record(const TimeSeriesRecord& r, int d) {
  std::string line;
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    if (!line.empty()) line += ',';
    line += buf;
  };
  put(r.t);
  put(r.m.rho);
  for (int a = 0; a < d; ++a) put(r.m.u[a]);
  put(r.m.temperature);
  put(r.m.energy);
  put(r.entropy);
  put(r.step_l2_diff);
  put(r.min_f);
  return line;
}

inline void write_series(const std::filesystem::path& path, std::span<const TimeSeriesRecord> series, int d) {
  detail::write_atomically(path, std::ios::out, [&](std::ostream& out) {
    out << series_header(d) << '\n';
    for (const auto& r : series) out << format_record(r, d) << '\n';
  });
}

/// Column name -> values from a series CSV.
inline std::map<std::string, std::vector<double>> read_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open series " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::IoError, path.string() + ": empty series file");
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string name;
    while (std::getline(hs, name, ',')) names.push_back(name);
  }
  std::map<std::string, std::vector<double>> cols;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= names.size()) throw Error(Errc::IoError, path.string() + ": too many cells on row " + std::to_string(row));
      cols[names[c++]].push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (c != names.size()) throw Error(Errc::IoError, path.string() + ": too few cells on row " + std::to_string(row));
  }
  return cols;
}

// ---------------------------------------------------------------------------
// Commands

inline CollisionModel model_of(const RunConfig& cfg) { return collision_model(cfg.problem); }

inline PrecomputeOptions precompute_options(const RunConfig& cfg, std::ostream* log) {
  PrecomputeOptions o;
  o.memory_budget_bytes = cfg.memory_budget_bytes;
  o.spill_dir = cfg.out_dir;
  if (log) o.report = [log](const std::string& s) { *log << s << '\n'; };
  return o;
}

inline std::filesystem::path cache_path(const RunConfig& cfg) { return cfg.out_dir / "tables.ggw"; }

/// Builds the fast-method tables and stores them in the cache file.
inline void command_precompute(const RunConfig& cfg, std::ostream& log) {
  detail::check_writable_dir(cfg.out_dir);
  const auto model = model_of(cfg);
  const auto opts = precompute_options(cfg, &log);
  const auto loss = precompute_loss(model, opts);
  const auto gain = precompute_gain(model, opts);
  save_tables(cache_path(cfg), loss, gain);
  log << "cache=" << cache_path(cfg).string() << "\nfingerprint=" << table_fingerprint(model) << '\n';
}

/// Runs the configured problem; writes series.csv, periodic snapshots and
/// final.ggs into the output directory.
inline RunResult command_run(const RunConfig& cfg, std::ostream& log) {
  detail::check_writable_dir(cfg.out_dir);
  RunOptions opts;
  opts.precompute = precompute_options(cfg, &log);
  if (cfg.use_cache && cfg.solver.method == Method::Fast) opts.cache = cache_path(cfg);
  RunResult r = run(cfg.problem, cfg.solver, opts);
  const GridSpec& g = cfg.problem.grid;
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06zu.ggs", i + 1);
    write_snapshot(cfg.out_dir / name, g, r.snapshots[i].values);
  }
  write_snapshot(cfg.out_dir / "final.ggs", g, r.final_state.values());
  write_series(cfg.out_dir / "series.csv", r.series, g.d);
  const auto& last = r.series.back();
  log << "t=" << last.t << "\nT=" << last.m.temperature << "\nsteps=" << r.steps << "\nmax_q0=" << r.max_q0 << '\n';
  if (r.steady_time) log << "steady_t=" << *r.steady_time << '\n';
  return r;
}

/// Nonnegative field supported in B_S with independent uniform cell values.
inline std::vector<cplx> random_field_coeffs(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DistributionField f(g);
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = unflatten(i, g.d, g.n);
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) r2 += g.node(idx[a]) * g.node(idx[a]);
    v[i] = r2 <= g.s * g.s ? u(rng) : 0.0;
  }
  to_spectral(f);
  return {f.coeffs().begin(), f.coeffs().end()};
}

inline double relative_l2(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Max relative l2 discrepancy between the direct and fast operators over
/// 10 random fields and the configured initial condition.
inline double command_compare(const RunConfig& cfg, std::ostream& out) {
  const auto model = model_of(cfg);
  const auto opts = precompute_options(cfg, nullptr);
  const auto direct = precompute_direct(model, opts);
  const auto loss = precompute_loss(model, opts);
  const auto gain = precompute_gain(model, opts);
  const GridSpec& g = model.grid;
  // E^gamma multiplies both operators alike; compare at E = 1.
  const std::optional<double> energy = model.kernel.gamma != 0.0 ? std::optional<double>(1.0) : std::nullopt;
  auto direct_q = [&](std::span<const cplx> f) { return eval_direct(direct, f); };
  double worst_random = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = random_field_coeffs(g, seed);
    worst_random = std::max(worst_random, relative_l2(eval_fast(gain, loss, f, energy), direct_q(f)));
  }
  const auto f0 = build_initial(cfg.problem.ic, g);
  const auto c0 = std::as_const(f0).coeffs();
  const double ic = relative_l2(eval_fast(gain, loss, c0, energy), direct_q(c0));
  out << "random_fields=10\nmax_rel_l2_random=" << worst_random << "\nrel_l2_initial=" << ic
      << "\nmax_rel_l2=" << std::max(worst_random, ic) << '\n';
  return std::max(worst_random, ic);
}

struct DiagnoseRequest {
  std::string what;  ///< tail | haff | entropy
  std::filesystem::path snapshot;
  std::filesystem::path series;
  std::filesystem::path reference;
  double t_lo = 10.0;
  double t_hi = 50.0;
  double v2 = 0.17;
};

/// Prints key=value lines for the requested diagnostic.
inline void command_diagnose(const DiagnoseRequest& req, std::ostream& out) {
  if (req.what == "tail") {
    const auto f = field_from_snapshot(read_snapshot(req.snapshot));
    const auto fit = tail_exponent(f, req.v2);
    out << "alpha=" << fit.best_alpha << "\nsamples=" << fit.samples << "\nv2=" << fit.v2 << '\n';
    for (const auto& c : fit.candidates) out << "residual_" << c.alpha << '=' << c.residual << '\n';
  } else if (req.what == "haff") {
    const auto cols = read_series(req.series);
    const auto t = cols.find("t");
    const auto temp = cols.find("T");
    if (t == cols.end() || temp == cols.end()) throw Error(Errc::IoError, "series lacks t or T column");
    out << "slope=" << haff_slope(t->second, temp->second, req.t_lo, req.t_hi) << "\nt_lo=" << req.t_lo
        << "\nt_hi=" << req.t_hi << '\n';
  } else if (req.what == "entropy") {
    const auto f = read_snapshot(req.snapshot);
    if (req.reference.empty()) {
      const auto field = field_from_snapshot(f);
      const auto h = entropy(field.values(), field.grid());
      out << "entropy=" << h.value << "\nskipped=" << h.skipped << '\n';
    } else {
      const auto g = read_snapshot(req.reference);
      if (g.d != f.d || g.n != f.n || g.l != f.l) throw Error(Errc::GridMismatch, "snapshots live on different grids");
      const auto field = field_from_snapshot(f);
      const auto h = relative_entropy(f.values, g.values, field.grid());
      out << "relative_entropy=" << h.value << "\nskipped=" << h.skipped << '\n';
    }
  } else {
    throw Error(Errc::InvalidParameter, "unknown diagnostic '" + req.what + "' (tail, haff, entropy)");
  }
}

}  // namespace granular
