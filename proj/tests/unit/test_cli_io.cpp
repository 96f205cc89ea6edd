#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chemo/errors.hpp"
#include "chemo/experiments.hpp"
#include "chemo/io.hpp"
#include "chemo/manifest.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using chemo::RunManifest;
using chemo::SpectralField;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chemo_cli_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Message of the ConfigError thrown by parse_config, or "" if none.
std::string config_error(const std::string& text, int* line = nullptr, std::string* field = nullptr) {
  try {
    chemo::parse_config(text);
  } catch (const chemo::ConfigError& e) {
    if (line != nullptr) *line = e.line();
    if (field != nullptr) *field = e.field();
    return e.what();
  }
  return "";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CHEMOSIM_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

SpectralField random_field(int n, double mean) {
  chemo::InitialSpec spec;
  spec.kind = "random";
  spec.amplitude = 1.0;
  chemo::SimConfig cfg;
  cfg.n_modes = n;
  cfg.mean = mean;
  cfg.seed = 5;
  return chemo::initial_field(spec, cfg);
}

}  // namespace

TEST_CASE("configuration examples: theta and the violated inequality") {
  const RunManifest m = chemo::parse_config("[model]\nalpha0 = -0.25\nalpha = 0.1\neta = 0.2\n");
  CHECK(m.cfg.theta() == doctest::Approx(0.025));

  int line = 0;
  std::string field;
  const std::string eta = config_error("[model]\nalpha0 = -0.25\nalpha = 0.1\n\neta = 0.3\n", &line, &field);
  CHECK(eta.find("eta < 1/4 violated") != std::string::npos);
  CHECK(line == 5);
  CHECK(field == "model.eta");

  const std::string alpha = config_error("[model]\nalpha0 = -0.25\nalpha = 0.4\neta = 0.2\n", &line);
  CHECK(alpha.find("alpha < alpha0 + 1/2 violated") != std::string::npos);
  CHECK(line == 3);
}

TEST_CASE("parse errors carry line and field") {
  int line = 0;
  std::string field;
  CHECK(config_error("[model]\nchi = fast\n", &line, &field).find("expected a number") != std::string::npos);
  CHECK(line == 2);
  CHECK(field == "model.chi");
  CHECK(config_error("# comment\n[model]\nkappa = 1\n", &line).find("kappa") != std::string::npos);
  CHECK(line == 3);
  CHECK(!config_error("[physics]\n").empty());
  CHECK(!config_error("[model]\nchi = 1\nchi = 2\n", &line).empty());
  CHECK(line == 3);
  CHECK(!config_error("[model]\nchi 1\n").empty());
  CHECK(!config_error("[run]\nexperiment = dance\n").empty());
  CHECK(!config_error("[discretization]\nmodes = 8.5\n").empty());
  CHECK(!config_error("[initial]\nkind = spiky\n").empty());
}

TEST_CASE("a full configuration round-trips into the manifest") {
  const RunManifest m = chemo::parse_config(R"(# a tv run
[model]
chi = 2        # repulsion strength
mean = 0.5
[discretization]
modes = 16
dt = 5e-4
t_end = 3
noise_substeps = 2
[initial]
kind = cosine
amplitude = 4
mode = 2
battery = 0, 10, 1000
[run]
experiment = tv
seed = 42
paths = 200
out = results/tv
)");
  CHECK(m.kind == chemo::Experiment::kTv);
  CHECK(m.cfg.chi == 2.0);
  CHECK(m.cfg.mean == 0.5);
  CHECK(m.cfg.n_modes == 16);
  CHECK(m.cfg.dt == 5e-4);
  CHECK(m.cfg.noise_substeps == 2);
  CHECK(m.initial.battery == std::vector<double>{0.0, 10.0, 1000.0});
  CHECK(m.cfg.seed == 42);
  CHECK(m.paths == 200);
  CHECK(m.out == fs::path("results/tv"));
  CHECK(!config_error("[run]\nexperiment = tv\npaths = 1\n").empty());
}

TEST_CASE("manifest echo is sorted, complete and deterministic") {
  const RunManifest m = chemo::parse_config("[model]\nchi = 0.1\n");
  const std::string e = m.echo();
  CHECK(e == chemo::parse_config("[model]\nchi = 0.1\n").echo());
  CHECK(e.find("model.chi = 0.10000000000000001\n") != std::string::npos);
  CHECK(e.find("run.version = chemosim") != std::string::npos);
  std::istringstream lines(e);
  std::string prev;
  for (std::string l; std::getline(lines, l);) {
    CHECK(prev < l);
    prev = l;
  }
}

TEST_CASE("initial data kinds") {
  chemo::SimConfig cfg;
  cfg.n_modes = 8;
  cfg.mean = 1.5;
  chemo::InitialSpec spec;
  CHECK(chemo::initial_field(spec, cfg) == SpectralField::constant(8, 1.5));
  spec.kind = "cosine";
  spec.amplitude = 2.0;
  spec.mode = 3;
  CHECK((chemo::initial_field(spec, cfg) - SpectralField::constant(8, 1.5) - SpectralField::cosine(8, 3, 2.0))
            .l2_norm() < 1e-15);
  spec.mode = 9;
  CHECK_THROWS_AS(chemo::initial_field(spec, cfg), chemo::ConfigError);
  const SpectralField r = random_field(8, 1.5);
  CHECK(r.mean() == 1.5);
  CHECK((r - SpectralField::constant(8, 1.5)).l2_norm() == doctest::Approx(1.0));
  CHECK(r == random_field(8, 1.5));
}

TEST_CASE("field files: byte layout and round trip") {
  const fs::path dir = scratch("field");
  const SpectralField f = random_field(6, 0.25);
  chemo::io::write_field(dir / "f", f);
  CHECK(fs::file_size(dir / "f.bin") == (2 * 6 + 1) * 16);
  CHECK(chemo::io::read_field(dir / "f") == f);
  std::ifstream in(dir / "f.bin", std::ios::binary);
  double head[4];
  in.read(reinterpret_cast<char*>(head), sizeof head);
  CHECK(head[0] == 0.25);
  CHECK(head[1] == 0.0);
  CHECK(head[2] == f.coeff(1).real());
  CHECK(head[3] == f.coeff(1).imag());
}

TEST_CASE("driver checkpoints resume exactly") {
  const fs::path dir = scratch("driver");
  chemo::NoiseDriver d(77, 0.1, 8, 2);
  for (int k = 0; k < 3; ++k) d.ou_step(1e-3);
  chemo::io::write_driver_state(dir / "state.txt", d);
  chemo::NoiseDriver r = chemo::io::read_driver_state(dir / "state.txt");
  CHECK(r.sample_field() == d.sample_field());
  CHECK(r.clock() == d.clock());
  d.ou_step(1e-3);
  r.ou_step(1e-3);
  CHECK(r.sample_field() == d.sample_field());
}

TEST_CASE("csv round trip and shape checks") {
  const fs::path dir = scratch("csv");
  {
    chemo::io::CsvWriter w(dir / "t.csv", "header line\nsecond", {"a", "b"});
    w.row({"1", "x"});
    w.row({"2", "y"});
    CHECK_THROWS(w.row({"3"}));
  }
  const chemo::io::CsvTable t = chemo::io::read_csv(dir / "t.csv");
  CHECK(t.columns == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][t.column("b")] == "y");
  CHECK_THROWS_AS(t.column("c"), std::runtime_error);
  CHECK(slurp(dir / "t.csv").rfind("# header line\n# second\n", 0) == 0);
  CHECK_THROWS(chemo::io::read_csv(dir / "missing.csv"));
}

TEST_CASE("calibration files round-trip") {
  const fs::path dir = scratch("calibration");
  chemo::Calibration c;
  c.picard_c = 0.03125;
  c.apriori_c = 3.0517578125e-05;
  c.seeds = {1, 2, 18446744073709551615ull};
  chemo::write_calibration(dir / "cal.txt", c, "test");
  const chemo::Calibration r = chemo::read_calibration(dir / "cal.txt");
  CHECK(r.picard_c == c.picard_c);
  CHECK(r.apriori_c == c.apriori_c);
  CHECK(r.contraction_target == c.contraction_target);
  CHECK(r.seeds == c.seeds);
  CHECK(r.version == c.version);
}

TEST_CASE("simulate without noise from a constant is trivial and exits 0") {
  const fs::path dir = scratch("simulate");
  RunManifest m = chemo::parse_config("[model]\nmean = 2\n[discretization]\nmodes = 8\nnoise = false\nt_end = 0.05\n");
  m.out = dir / "a";
  std::ostringstream log;
  REQUIRE(chemo::orchestrate(m, log) == 0);
  const chemo::Trajectory traj = chemo::io::read_trajectory(m.out);
  REQUIRE(!traj.u.empty());
  for (const auto& u : traj.u) CHECK(u == SpectralField::constant(8, 2.0));
  CHECK(slurp(m.out / "manifest.txt").find(m.echo()) != std::string::npos);

  // Rerun is byte-identical in every output.
  m.out = dir / "b";
  REQUIRE(chemo::orchestrate(m, log) == 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const fs::path twin = dir / "b" / entry.path().filename();
    REQUIRE(fs::exists(twin));
    CHECK(slurp(entry.path()) == slurp(twin));
    ++files;
  }
  CHECK(files >= 4);
}

TEST_CASE("calibrate writes a file that later runs consume") {
  const fs::path dir = scratch("calibrate");
  RunManifest m = chemo::parse_config("[run]\nexperiment = calibrate\npaths = 2\n");
  m.out = dir / "cal";
  std::ostringstream log;
  REQUIRE(chemo::orchestrate(m, log) == 0);
  const chemo::Calibration cal = chemo::read_calibration(m.out / "calibration.txt");
  CHECK(cal.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(cal.picard_c > std::exp2(-20));
  CHECK(cal.apriori_c > 0.0);

  RunManifest a = chemo::parse_config("[run]\nexperiment = apriori\npaths = 2\n");
  a.cfg = chemo::apriori_gate_config();
  a.cfg.t_end = 0.2;
  a.calibration = (m.out / "calibration.txt").string();
  a.out = dir / "apriori";
  CHECK(chemo::orchestrate(a, log) == 0);
  const chemo::io::CsvTable env = chemo::io::read_csv(a.out / "envelope.csv");
  CHECK(!env.rows.empty());
  CHECK(slurp(a.out / "envelope.csv").find("# run.calibration = " + a.calibration) != std::string::npos);

  // Plot data from the same directory: bound >= value on every row since the gate passed.
  REQUIRE(chemo::emit_plotdata(a.out).size() == 1);
  const chemo::io::CsvTable plot = chemo::io::read_csv(a.out / "plot_envelope.csv");
  for (const auto& row : plot.rows) {
    CHECK(row[plot.column("gate_pass")] == "1");
    CHECK(std::stod(row[plot.column("bound")]) >= std::stod(row[plot.column("value")]));
  }
}

TEST_CASE("plot data from an empty directory names the expected files") {
  const fs::path dir = scratch("empty");
  try {
    chemo::emit_plotdata(dir);
    FAIL("no error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("envelope.csv") != std::string::npos);
    CHECK(msg.find("tail.csv") != std::string::npos);
    CHECK(msg.find("tv.csv") != std::string::npos);
  }
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("simulate --bogus") == 2);
  CHECK(run_cli("simulate --config " + (dir / "nope.cfg").string()) == 2);
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "[model]\neta = 0.3\n";
  }
  CHECK(run_cli("simulate --config " + (dir / "bad.cfg").string() + " --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("simulate --modes 0 --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("simulate --modes 8 --dt 1e-3 --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "report.csv"));
  CHECK(run_cli("plotdata --out " + (dir / "ok").string()) == 1);
  {
    std::ofstream blow(dir / "blow.cfg");
    blow << "[model]\nchi = -50\n[initial]\nkind = cosine\namplitude = 50\n[discretization]\nmodes = 16\nt_end = 1\n";
  }
  CHECK(run_cli("simulate --config " + (dir / "blow.cfg").string() + " --out " + (dir / "blow").string()) == 3);
}
