#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlphase/config.hpp"
#include "nlphase/errors.hpp"
#include "nlphase/experiments.hpp"

using namespace nlphase;
namespace fs = std::filesystem;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in, "t.conf");
}

std::string error_of(const std::string& text, bool resolve) {
  try {
    const Config c = parse(text);
    if (resolve) resolve_config(c);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nlphase_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const char* kMinimize =
    "experiment.type = Minimize\n"
    "run.seed = 3\n"
    "grid.h = 1/8\n"
    "grid.box_radius = 2\n"
    "field.initial = random\n"
    "energy.s = 0.3\n";

}  // namespace

TEST_CASE("values, fractions and lists") {
  const Config c = parse("# header\n\na.b = 1/4   # trailing\nlist.x = 1, 2/3 ,5\nname.t = hello world\n");
  CHECK(c.get_double("a.b") == 0.25);
  const auto xs = c.get_list("list.x");
  REQUIRE(xs.size() == 3);
  CHECK(xs[1] == doctest::Approx(2.0 / 3.0));
  CHECK(c.get_string("name.t") == "hello world");
  CHECK(c.where("list.x") == "t.conf:4: ");
  CHECK(parse_real(" -3/2 ") == -1.5);
  CHECK_THROWS_AS(parse_real("1/0"), InputError);
  CHECK_THROWS_AS(parse_real_list("1,,2"), InputError);
}

TEST_CASE("syntax errors name the line") {
  CHECK(error_of("a.b = 1\njunk\n", false).rfind("t.conf:2:", 0) == 0);
  CHECK(error_of("a.b = 1\nnodot = 2\n", false).find("t.conf:2: malformed key") != std::string::npos);
  CHECK(error_of("a.b =\n", false).find("t.conf:1: empty value") != std::string::npos);
  const std::string dup = error_of("a.b = 1\n\na.b = 2\n", false);
  CHECK(dup.find("t.conf:3:") != std::string::npos);
  CHECK(dup.find("line 1") != std::string::npos);
}

TEST_CASE("type errors name the line") {
  const Config c = parse("a.b = 1\nc.d = x/2\n");
  try {
    c.get_double("c.d");
    FAIL("expected a type error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("t.conf:2: c.d", 0) == 0);
  }
  CHECK_THROWS_AS(c.get_double("e.f"), ConfigError);
}

TEST_CASE("catalog") {
  CHECK(experiment_catalog().size() == 8);
  CHECK(find_experiment("GammaSweep").name == "GammaSweep");
  CHECK_THROWS_AS(find_experiment("Nope"), ConfigError);
  for (const auto& e : experiment_catalog()) {
    CHECK_FALSE(e.verifies.empty());
    CHECK(e.keys.front().key == "experiment.type");
  }
}

TEST_CASE("resolution fills defaults and rejects bad keys") {
  const Config r = resolve_config(parse("experiment.type = GammaSweep\n"));
  CHECK(r.get_double("grid.h") == 1.0 / 1024);
  CHECK(r.get_list("energy.s_list").size() == 3);
  CHECK(error_of("experiment.type = GammaSweep\nenergy.q = 3\n", true).find("t.conf:2:") != std::string::npos);
  CHECK(error_of("experiment.type = Bogus\n", true).find("t.conf:1:") != std::string::npos);
  CHECK_FALSE(error_of("grid.h = 1\n", true).empty());
  CHECK(error_of("experiment.type = GammaSweep\nenergy.s_list = 0.9, 0.8\n", true).find("t.conf:2:") !=
        std::string::npos);
  CHECK(error_of("experiment.type = Minimize\ngrid.n = 1.5\n", true).find("t.conf:2:") != std::string::npos);
}

TEST_CASE("density radii must satisfy the ball containment") {
  const std::string msg =
      error_of("experiment.type = DensityScan\ngrid.box_radius = 30\nscan.radii = 2, 4, 16\n", true);
  CHECK(msg.find("t.conf:3:") != std::string::npos);
  CHECK(msg.find("B_{3r}") != std::string::npos);
  const std::string full =
      error_of("experiment.type = FullDensityScan\ngrid.box_radius = 30\nscan.radii = 2, 4, 8\n", true);
  CHECK(full.find("B_{4r}") != std::string::npos);
}

TEST_CASE("2D with sp >= 1 is rejected before running") {
  CHECK(error_of("experiment.type = Minimize\ngrid.n = 2\nenergy.s = 0.6\n", true).find("t.conf:") !=
        std::string::npos);
}

TEST_CASE("runs write a CSV and manifest") {
  const fs::path dir = scratch_dir("run");
  RunOptions opts;
  opts.output_dir = dir;
  const RunResult res = run_experiment(parse("experiment.type = PotentialCheck\npotential.m_list = 2, 3\n"), opts);
  CHECK(res.exit_code == kExitOk);
  CHECK(fs::exists(dir / "potentialcheck.csv"));
  CHECK(fs::exists(dir / "potentialcheck.manifest"));
  const std::string csv = slurp(dir / "potentialcheck.csv");
  CHECK(csv.rfind("# nlphase PotentialCheck\n", 0) == 0);
  CHECK(csv.find("# potential.m_list = 2, 3") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("seeded runs are byte-identical across thread counts") {
  const fs::path a = scratch_dir("a"), b = scratch_dir("b"), c = scratch_dir("c");
  RunOptions opts;
  opts.output_dir = a;
  const Config cfg = parse(kMinimize);
  CHECK(run_experiment(cfg, opts).exit_code == kExitOk);
  opts.output_dir = b;
  opts.threads = 4;
  CHECK(run_experiment(cfg, opts).exit_code == kExitOk);
  opts.output_dir = c;
  opts.seed = 4;
  run_experiment(cfg, opts);
  const std::string csv_a = slurp(a / "minimize.csv");
  CHECK_FALSE(csv_a.empty());
  CHECK(csv_a == slurp(b / "minimize.csv"));
  CHECK(slurp(a / "minimize_field.txt") == slurp(b / "minimize_field.txt"));
  CHECK(csv_a != slurp(c / "minimize.csv"));
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}
