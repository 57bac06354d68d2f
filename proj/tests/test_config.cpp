#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pinnet/config.hpp"
#include "pinnet/errors.hpp"
#include "pinnet/io.hpp"

using namespace pinnet;

namespace {

std::string preset(const char* name) {
  return std::string(PINNET_PRESET_DIR) + "/" + name;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "pinnet_config_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("sectioned text parsing") {
  ConfigFile f = ConfigFile::parse(
      "# comment\n"
      "[alpha]\n"
      "x = 1\n"
      "name = hello world\n"
      "\n"
      "[beta]\n"
      "y = 2 3 4\n");
  REQUIRE(f.sections.size() == 2);
  CHECK(f.sections[0].name == "alpha");
  REQUIRE(f.find("alpha") != nullptr);
  CHECK(*f.find("alpha")->find("x") == "1");
  CHECK(*f.find("alpha")->find("name") == "hello world");
  CHECK(f.find("alpha")->find("missing") == nullptr);
  CHECK(f.find("gamma") == nullptr);

  CHECK_THROWS_AS(ConfigFile::parse("x = 1\n"), ValidationError);
  CHECK_THROWS_AS(ConfigFile::parse("[a]\nx = 1\nx = 2\n"), ValidationError);
  CHECK_THROWS_AS(ConfigFile::parse("[a]\n[a]\n"), ValidationError);
  CHECK_THROWS_AS(ConfigFile::parse("[a]\njust words\n"), ValidationError);
}

TEST_CASE("scalar and matrix values") {
  CHECK(parse_double("2.5") == 2.5);
  CHECK_THROWS_AS((void)parse_double("2.5x"), ValidationError);
  CHECK_THROWS_AS((void)parse_double(""), ValidationError);

  auto v = parse_vector("1 -2 0.5");
  REQUIRE(v.size() == 3);
  CHECK(v[1] == -2.0);

  Matrix m = parse_matrix("1 2; 3 4", "");
  REQUIRE(m.rows == 2);
  CHECK(m(1, 0) == 3.0);
  CHECK_THROWS_AS((void)parse_matrix("1 2; 3", ""), ValidationError);

  // Round-trip through the shortest representation.
  for (double x : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -0.0314159}) {
    CHECK(parse_double(format_double(x)) == x);
  }
  Matrix back = parse_matrix(format_matrix(m), "");
  CHECK(back == m);
  auto vb = parse_vector(format_vector(v));
  CHECK(vb == v);
}

TEST_CASE("matrix file references") {
  auto dir = scratch_dir();
  write_file_atomic((dir / "m.txt").string(),
                    "# rows\n1 2 3\n4 5 6\n");
  Matrix m = parse_matrix("file:m.txt", dir.string());
  REQUIRE(m.rows == 2);
  REQUIRE(m.cols == 3);
  CHECK(m(1, 2) == 6.0);

  CHECK_THROWS_AS((void)parse_matrix("file:absent.txt", dir.string()), Error);
}

TEST_CASE("experiment config round-trip") {
  for (const char* name : {"slow_switching.cfg", "mobile_spatial.cfg"}) {
    ExperimentConfig cfg = load_experiment(preset(name));
    ExperimentConfig back = parse_experiment(
        ConfigFile::parse(serialize_experiment(cfg)));
    CHECK(back == cfg);
  }
}

TEST_CASE("experiment validation") {
  ExperimentConfig slow = load_experiment(preset("slow_switching.cfg"));
  CHECK(slow.kind == ExperimentKind::SlowSwitching);
  CHECK(slow.seed == 42);
  CHECK(slow.runs == 20);
  CHECK(slow.L.size() == 5);
  CHECK(slow.C.size() == 5);
  CHECK(slow.q.empty());
  CHECK(slow.q_high == 0.75);
  CHECK(slow.coupling.kappa == 10.0);
  CHECK(slow.embedded.rows == 5);
  CHECK(slow.weights == "identity");

  ExperimentConfig mob = load_experiment(preset("mobile_spatial.cfg"));
  CHECK(mob.kind == ExperimentKind::MobileSpatial);
  CHECK(mob.has_mobility);
  CHECK(mob.mobility.agents == 10);
  CHECK(mob.mobility.w_min == 0.29);
  CHECK(mob.p_meet == 0.99);
  CHECK(mob.k4 == 2500.0);
  CHECK(mob.r_steps == 750);
  CHECK(mob.alpha == 8.5);
  CHECK(mob.lf == 4.68);

  // Both explicit rates and a range is ambiguous; neither is incomplete.
  const std::string head =
      "[experiment]\nkind = custom\n"
      "[dynamics]\nd = 1\nt = 1\ng = 1\ngamma = 1\nalpha = 1\nbeta = 1\n"
      "[coupling]\nkappa = 1\nepsilon = 1\n";
  CHECK_THROWS_AS(
      (void)parse_experiment(ConfigFile::parse(
          head + "[chain]\nembedded = 0 1; 1 0\nq = 1 1\nq_range = 0 1\n")),
      ValidationError);
  CHECK_THROWS_AS(
      (void)parse_experiment(ConfigFile::parse(
          head + "[chain]\nembedded = 0 1; 1 0\n")),
      ValidationError);
  CHECK_THROWS_AS(
      (void)parse_experiment(ConfigFile::parse(
          head + "[chain]\nembedded = 0 1; 1 0\nq_range = 1 0\n")),
      ValidationError);
  CHECK_THROWS_AS((void)parse_experiment(ConfigFile::parse(
                      "[experiment]\nkind = nonsense\n")),
                  ValidationError);
}

TEST_CASE("node model from config") {
  ExperimentConfig cfg = load_experiment(preset("slow_switching.cfg"));
  DynamicsSpec dyn = dynamics_from(cfg);
  CHECK(dyn.n == 3);
  CHECK(dyn.alpha == 1.0);
  CHECK(dyn.beta == 0.5);
  double x[3] = {2, 2, 2};
  double dx[3];
  dyn.f(0.0, x, dx);
  CHECK(dx[0] == doctest::Approx(-7.15).epsilon(1e-12));
}

TEST_CASE("atomic file writes") {
  auto dir = scratch_dir();
  auto path = (dir / "atom.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS((void)read_file((dir / "nope.txt").string()), Error);
}
