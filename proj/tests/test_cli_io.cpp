#include <gtest/gtest.h>

#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "granular/cli_io.hpp"

using namespace granular;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = GRANULAR_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("granular-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::IoError;
}

const char* kSmall = R"(version = 1
[grid]
d = 2
n = 16
s = 1
[kernel]
preset = maxwell_2d
[restitution]
e = 0.95
[initial]
kind = maxwellian2d
t0 = 0.1
[solver]
tau = 0.05
t_final = 0.05
output_every = 1
snapshot_every = 2
)";

std::string with(const std::string& base, const std::string& section, const std::string& line) {
  std::string s = base;
  const auto at = s.find("[" + section + "]\n");
  if (at == std::string::npos) return s + "[" + section + "]\n" + line + "\n";
  s.insert(at + section.size() + 3, line + "\n");
  return s;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(GRANULAR_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, Test1Preset) {
  const auto cfg = load_config(kSource / "configs" / "test1_maxwell.cfg");
  EXPECT_EQ(cfg.problem.grid.d, 2);
  EXPECT_EQ(cfg.problem.grid.n, 64);
  EXPECT_DOUBLE_EQ(cfg.problem.grid.r, 20.0);
  EXPECT_NEAR(cfg.problem.grid.l, 5.0 * (3.0 + std::sqrt(2.0)), 1e-12);
  EXPECT_EQ(std::get<ConstantRestitution>(cfg.problem.restitution).e, 0.95);
  EXPECT_EQ(cfg.problem.kernel, KernelSpec::maxwell_2d());
  EXPECT_EQ(cfg.solver.tau, 0.05);
  EXPECT_EQ(cfg.solver.dt, 0.01);
  EXPECT_EQ(cfg.solver.method, Method::Fast);
  EXPECT_EQ(cfg.problem.n_rho, 32);
  EXPECT_EQ(cfg.problem.m_angular, 16);
}

TEST(Config, AllPresetsParse) {
  for (const char* name : {"test1_maxwell", "test1_flat", "test2_tails", "test3_haff", "test3_vare"}) {
    EXPECT_NO_THROW(load_config(kSource / "configs" / (std::string(name) + ".cfg"))) << name;
  }
  const auto haff = load_config(kSource / "configs" / "test3_haff.cfg");
  EXPECT_EQ(haff.problem.grid.r, 8.0);
  EXPECT_EQ(haff.problem.kernel, KernelSpec::hard_spheres_3d());
  const auto& ic = std::get<Maxwellian3D>(haff.problem.ic);
  EXPECT_EQ(ic.u0[0], 0.5);
  EXPECT_EQ(ic.u0[1], -0.5);
  const auto vare = load_config(kSource / "configs" / "test3_vare.cfg");
  EXPECT_EQ(std::get<TanhRestitution>(vare.problem.restitution).e0, 0.8);
  const auto flat = load_config(kSource / "configs" / "test1_flat.cfg");
  EXPECT_NEAR(std::get<Flat2D>(flat.problem.ic).w0, 2.0 * std::sqrt(6.0), 1e-15);
}

TEST(Config, Defaults) {
  const auto cfg = parse_config(kSmall);
  EXPECT_EQ(cfg.solver.dt, 0.01);
  EXPECT_EQ(cfg.solver.method, Method::Fast);
  EXPECT_EQ(cfg.problem.n_rho, 16);
  EXPECT_EQ(cfg.problem.m_angular, 16);
  EXPECT_EQ(cfg.memory_budget_bytes, 8e9);
  std::string three = "version = 1\n[grid]\nd = 3\nn = 8\ns = 1\n[solver]\nt_final = 1\n";
  EXPECT_EQ(parse_config(three).problem.m_angular, 32);
  EXPECT_TRUE(std::holds_alternative<Maxwellian3D>(parse_config(three).problem.ic));
}

TEST(Config, OddResolutionIsConstraintError) {
  std::string s = kSmall;
  s.replace(s.find("n = 16"), 6, "n = 63");
  EXPECT_EQ(code_of([&] { parse_config(s); }), Errc::ConstraintError);
}

TEST(Config, UnknownKeyIsSchemaErrorWithPath) {
  try {
    parse_config(with(kSmall, "solver", "foo = 1"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaError);
    EXPECT_NE(std::string(e.what()).find("solver.foo"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { parse_config(std::string(kSmall) + "[bogus]\nx = 1\n"); }), Errc::SchemaError);
  EXPECT_EQ(code_of([&] { parse_config("foo = 1\n" + std::string(kSmall)); }), Errc::SchemaError);
}

TEST(Config, SchemaAndConstraintErrors) {
  EXPECT_EQ(code_of([&] { parse_config(with(kSmall, "solver", "method = slow")); }), Errc::SchemaError);
  EXPECT_EQ(code_of([&] { parse_config(with(kSmall, "grid", "l = 1.0")); }), Errc::ConstraintError);
  std::string e_big = kSmall;
  e_big.replace(e_big.find("e = 0.95"), 8, "e = 1.5");
  EXPECT_EQ(code_of([&] { parse_config(e_big); }), Errc::ConstraintError);
  EXPECT_EQ(code_of([&] { parse_config(with(kSmall, "restitution", "e = 0.5")); }), Errc::SchemaError);
  std::string bad_dt = kSmall;
  bad_dt.replace(bad_dt.find("tau = 0.05"), 10, "dt = abc");
  EXPECT_EQ(code_of([&] { parse_config(bad_dt); }), Errc::SchemaError);
  std::string no_version = kSmall;
  no_version.erase(0, no_version.find('\n') + 1);
  EXPECT_EQ(code_of([&] { parse_config(no_version); }), Errc::SchemaError);
  std::string v2 = kSmall;
  v2[10] = '2';
  EXPECT_EQ(code_of([&] { parse_config(v2); }), Errc::SchemaError);
  EXPECT_EQ(code_of([&] { parse_config(with(kSmall, "initial", "u0 = 1 2 3")); }), Errc::SchemaError);
  EXPECT_EQ(code_of([&] { parse_config(with(kSmall, "quadrature", "m_angular = 3")); }), Errc::ConstraintError);
  std::string dim = kSmall;
  dim.replace(dim.find("maxwellian2d"), 12, "maxwellian3d");
  EXPECT_EQ(code_of([&] { parse_config(dim); }), Errc::ConstraintError);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const auto dir = scratch("snapshot");
  const auto g = make_grid(2, 16, 1.0);
  const auto f = build_initial(Maxwellian2D{1.0, {0.1, 0.0}, 0.05}, g);
  std::vector<double> values(f.values().begin(), f.values().end());
  values[3] = -1e-300;
  values[5] = std::nextafter(1.0, 2.0);
  write_snapshot(dir / "a.ggs", g, values);
  EXPECT_EQ(fs::file_size(dir / "a.ggs"), kSnapshotHeader + values.size() * 8);
  const auto back = read_snapshot(dir / "a.ggs");
  EXPECT_EQ(back.d, 2);
  EXPECT_EQ(back.n, 16);
  EXPECT_EQ(back.l, g.l);
  ASSERT_EQ(back.values.size(), values.size());
  EXPECT_EQ(std::memcmp(back.values.data(), values.data(), values.size() * 8), 0);
  EXPECT_FALSE(fs::exists(dir / "a.ggs.tmp"));
}

TEST(Snapshot, HeaderLayout) {
  const auto dir = scratch("layout");
  const auto g = make_grid(3, 8, 1.0);
  write_snapshot(dir / "s.ggs", g, std::vector<double>(g.size(), 0.5));
  const std::string bytes = slurp(dir / "s.ggs");
  EXPECT_EQ(bytes.substr(0, 4), "GGS1");
  std::uint32_t h[3];
  std::memcpy(h, bytes.data() + 4, 12);
  EXPECT_EQ(h[0], 1u);
  EXPECT_EQ(h[1], 3u);
  EXPECT_EQ(h[2], 8u);
  double l;
  std::memcpy(&l, bytes.data() + 16, 8);
  EXPECT_EQ(l, g.l);
}

TEST(Snapshot, CorruptFiles) {
  const auto dir = scratch("corrupt");
  const auto g = make_grid(2, 8, 1.0);
  write_snapshot(dir / "ok.ggs", g, std::vector<double>(g.size(), 1.0));
  std::string bytes = slurp(dir / "ok.ggs");
  auto dump = [&](const std::string& name, const std::string& content) {
    std::ofstream(dir / name, std::ios::binary) << content;
    return dir / name;
  };
  EXPECT_EQ(code_of([&] { read_snapshot(dump("trunc.ggs", bytes.substr(0, bytes.size() - 8))); }), Errc::CorruptSnapshot);
  EXPECT_EQ(code_of([&] { read_snapshot(dump("head.ggs", bytes.substr(0, 10))); }), Errc::CorruptSnapshot);
  EXPECT_EQ(code_of([&] { read_snapshot(dump("long.ggs", bytes + "x")); }), Errc::CorruptSnapshot);
  std::string magic = bytes;
  magic[3] = '2';
  EXPECT_EQ(code_of([&] { read_snapshot(dump("magic.ggs", magic)); }), Errc::CorruptSnapshot);
  std::string version = bytes;
  version[4] = 9;
  EXPECT_EQ(code_of([&] { read_snapshot(dump("version.ggs", version)); }), Errc::CorruptSnapshot);
  EXPECT_EQ(code_of([&] { write_snapshot(dir / "x.ggs", g, std::vector<double>(3)); }), Errc::GridMismatch);
}

TEST(Series, HeaderAndPrecision) {
  EXPECT_EQ(series_header(2), "t,rho,ux,uy,T,E,entropy,step_l2_diff,min_f");
  EXPECT_EQ(series_header(3), "t,rho,ux,uy,uz,T,E,entropy,step_l2_diff,min_f");
  TimeSeriesRecord r;
  r.t = 0.1;
  r.m = {1.0 / 3.0, {0.25, -2.0, 0.0}, 8.0, 8.0};
  r.entropy = -1.5;
  r.min_f = -1e-17;
  const std::string line = format_record(r, 2);
  EXPECT_EQ(line, "0.10000000000000001,0.33333333333333331,0.25,-2,8,8,-1.5,nan,-1.0000000000000001e-17");
  std::stringstream ss(line);
  std::string cell;
  std::getline(ss, cell, ',');
  EXPECT_EQ(std::stod(cell), 0.1);
}

TEST(Series, WriteAndReadBack) {
  const auto dir = scratch("series");
  std::vector<TimeSeriesRecord> s(3);
  for (int i = 0; i < 3; ++i) {
    s[i].t = 0.5 * i;
    s[i].m = {1.0, {0.0, 0.0, 0.25}, 3.0 - i, 2.0 - 0.1 * i};
  }
  write_series(dir / "series.csv", s, 3);
  const auto cols = read_series(dir / "series.csv");
  ASSERT_EQ(cols.at("T").size(), 3u);
  EXPECT_EQ(cols.at("T")[2], 1.8);
  EXPECT_EQ(cols.at("uz")[1], 0.25);
  EXPECT_TRUE(std::isnan(cols.at("step_l2_diff")[0]));
}

TEST(Commands, RunWritesSeriesAndSnapshotsDeterministically) {
  auto cfg = parse_config(kSmall);
  cfg.out_dir = scratch("run-a");
  std::ostringstream log;
  const auto r = command_run(cfg, log);
  EXPECT_NE(log.str().find("steps=5"), std::string::npos) << log.str();
  EXPECT_TRUE(fs::exists(cfg.out_dir / "final.ggs"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "snap_000001.ggs"));
  EXPECT_TRUE(fs::exists(cfg.out_dir / "snap_000002.ggs"));
  const auto cols = read_series(cfg.out_dir / "series.csv");
  EXPECT_EQ(cols.at("t").size(), r.series.size());
  EXPECT_EQ(cols.at("T").back(), r.series.back().m.temperature);
  const auto final_snap = read_snapshot(cfg.out_dir / "final.ggs");
  EXPECT_EQ(std::memcmp(final_snap.values.data(), r.final_state.values().data(), final_snap.values.size() * 8), 0);

  auto again = cfg;
  again.out_dir = scratch("run-b");
  command_run(again, log);
  EXPECT_EQ(slurp(cfg.out_dir / "series.csv"), slurp(again.out_dir / "series.csv"));
  EXPECT_EQ(slurp(cfg.out_dir / "final.ggs"), slurp(again.out_dir / "final.ggs"));
}

TEST(Commands, ElasticRunKeepsTemperature) {
  // resolved Maxwellian: 32 points, support 4.5 standard deviations
  std::string s = kSmall;
  s.replace(s.find("n = 16"), 6, "n = 32");
  s.replace(s.find("t0 = 0.1"), 8, "t0 = 0.05");
  s.replace(s.find("e = 0.95"), 8, "e = 1");
  s.replace(s.find("tau = 0.05"), 10, "tau = 0");
  s.replace(s.find("t_final = 0.05"), 14, "t_final = 1");
  auto cfg = parse_config(s);
  cfg.out_dir = scratch("elastic");
  std::ostringstream log;
  command_run(cfg, log);
  const auto cols = read_series(cfg.out_dir / "series.csv");
  for (double t : cols.at("T")) EXPECT_NEAR(t / cols.at("T").front(), 1.0, 1e-4);
}

TEST(Commands, CompareSmallGrid) {
  for (const char* e : {"e = 0.95", "e = 1"}) {
    std::string s = kSmall;
    s.replace(s.find("e = 0.95"), 8, e);
    std::ostringstream out;
    const double worst = command_compare(parse_config(s), out);
    EXPECT_LE(worst, 1e-8) << e;
    EXPECT_NE(out.str().find("max_rel_l2="), std::string::npos);
  }
}

TEST(Commands, CompareRejects3DN32) {
  const std::string s = "version = 1\n[grid]\nd = 3\nn = 32\ns = 4\n[kernel]\npreset = hard_spheres_3d\n[solver]\nt_final = 1\n";
  std::ostringstream out;
  EXPECT_EQ(code_of([&] { command_compare(parse_config(s), out); }), Errc::MemoryBudgetExceeded);
}

TEST(Commands, DiagnoseReportsKeyValues) {
  const auto dir = scratch("diagnose");
  // exp(-|v1|) profile with a Gaussian in v2 on a wide grid
  const auto g = make_grid(2, 64, 10.0);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = unflatten(i, 2, g.n);
    const double v1 = g.node(idx[0]), v2 = g.node(idx[1]);
    v[i] = std::exp(-std::abs(v1) - v2 * v2);
  }
  write_snapshot(dir / "tail.ggs", g, v);
  std::ostringstream out;
  command_diagnose({"tail", dir / "tail.ggs"}, out);
  EXPECT_NE(out.str().find("alpha=1\n"), std::string::npos) << out.str();

  out.str("");
  command_diagnose({"entropy", dir / "tail.ggs", {}, dir / "tail.ggs"}, out);
  EXPECT_NE(out.str().find("relative_entropy=0\n"), std::string::npos) << out.str();

  std::vector<TimeSeriesRecord> s;
  for (int i = 1; i <= 60; ++i) {
    TimeSeriesRecord r;
    r.t = i;
    r.m = {1.0, {}, 1.0, 1.0 / (i * i)};
    s.push_back(r);
  }
  write_series(dir / "series.csv", s, 2);
  out.str("");
  command_diagnose({"haff", {}, dir / "series.csv"}, out);
  const auto text = out.str();
  const double slope = std::stod(text.substr(text.find("slope=") + 6));
  EXPECT_NEAR(slope, -2.0, 1e-9);

  std::ofstream(dir / "bad.ggs") << "GGS1";
  EXPECT_EQ(code_of([&] { command_diagnose({"tail", dir / "bad.ggs"}, out); }), Errc::CorruptSnapshot);
}

TEST(Cli, RunAndDiagnoseEndToEnd) {
  const auto dir = scratch("cli");
  std::ofstream(dir / "small.cfg") << kSmall;
  EXPECT_EQ(run_cli("run --config " + (dir / "small.cfg").string() + " --out " + (dir / "out").string(), dir / "log"), 0)
      << slurp(dir / "log");
  EXPECT_TRUE(fs::exists(dir / "out" / "series.csv"));
  EXPECT_EQ(run_cli("diagnose --what entropy --snapshot " + (dir / "out" / "final.ggs").string(), dir / "log2"), 0);
  EXPECT_NE(slurp(dir / "log2").find("entropy="), std::string::npos);
  EXPECT_EQ(run_cli("precompute --config " + (dir / "small.cfg").string() + " --out " + (dir / "out").string(), dir / "log3"), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "tables.ggw"));
}

TEST(Cli, UnwritableOutputFailsWithoutCsv) {
  if (::geteuid() == 0) {
    // root ignores directory permissions; a regular file in the path is
    // unwritable for everyone
    const auto dir = scratch("unwritable-root");
    std::ofstream(dir / "small.cfg") << kSmall;
    std::ofstream(dir / "blocker") << "x";
    EXPECT_NE(run_cli("run --config " + (dir / "small.cfg").string() + " --out " + (dir / "blocker" / "out").string(), dir / "log"), 0);
    EXPECT_FALSE(fs::exists(dir / "blocker" / "out" / "series.csv"));
    EXPECT_NE(slurp(dir / "log").find("not writable"), std::string::npos) << slurp(dir / "log");
    return;
  }
  const auto dir = scratch("unwritable");
  std::ofstream(dir / "small.cfg") << kSmall;
  fs::create_directories(dir / "locked");
  ::chmod((dir / "locked").c_str(), 0500);
  EXPECT_NE(run_cli("run --config " + (dir / "small.cfg").string() + " --out " + (dir / "locked").string(), dir / "log"), 0);
  EXPECT_FALSE(fs::exists(dir / "locked" / "series.csv"));
  ::chmod((dir / "locked").c_str(), 0700);
}

TEST(Cli, BadConfigExitsNonzero) {
  const auto dir = scratch("badcfg");
  std::ofstream(dir / "bad.cfg") << with(kSmall, "grid", "foo = 1");
  EXPECT_NE(run_cli("run --config " + (dir / "bad.cfg").string(), dir / "log"), 0);
  EXPECT_NE(slurp(dir / "log").find("grid.foo"), std::string::npos);
}
