#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "pinnet/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = PINNET_CLI_PATH;
const std::string kPresets = PINNET_PRESET_DIR;

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pinnet_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  fs::path cap = fs::temp_directory_path() / "pinnet_cli_tests" / "cap.txt";
  fs::create_directories(cap.parent_path());
  std::string cmd = kCli + " " + args + " > " + cap.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
#ifdef WEXITSTATUS
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  r.exit_code = status;
#endif
  std::ifstream in(cap);
  r.output.assign(std::istreambuf_iterator<char>(in),
                  std::istreambuf_iterator<char>());
  return r;
}

std::string slow_cfg() { return kPresets + "/slow_switching.cfg"; }
std::string mobile_cfg() { return kPresets + "/mobile_spatial.cfg"; }

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("").exit_code == 1);
  CHECK(run("frobnicate --config x").exit_code == 1);
  CHECK(run("check").exit_code == 1);  // --config is required
  CHECK(run("check --config /nonexistent/path.cfg").exit_code == 1);
  CHECK(run("--help").exit_code == 0);
}

TEST_CASE("malformed config exits with 1") {
  auto dir = scratch("malformed");
  auto bad = dir / "bad.cfg";
  pinnet::write_file_atomic(bad.string(), "key outside any section\n");
  auto r = run("check --config " + bad.string());
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("config with nothing to check exits with 1") {
  auto dir = scratch("empty_topo");
  auto cfg = dir / "empty.cfg";
  pinnet::write_file_atomic(
      cfg.string(),
      "[experiment]\nkind = custom\nout = " + (dir / "out").string() +
          "\n"
          "[dynamics]\nd = 1 0 0; 0 1 0; 0 0 1\n"
          "t = 1.25 -3.2 -3.2; -3.2 1.1 -4.4; -3.2 4.4 1\n"
          "g = 1 0 0; 0 1 0; 0 0 1\ngamma = 1 0 0; 0 1 0; 0 0 1\n"
          "alpha = 1\nbeta = 0.5\n"
          "[coupling]\nkappa = 10\nepsilon = 1\n");
  auto r = run("check --config " + cfg.string());
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("certificate check passes on the slow demo") {
  auto dir = scratch("check_slow");
  auto r = run("check --config " + slow_cfg() + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("pass") != std::string::npos);
  CHECK(fs::exists(dir / "certificates.txt"));
  std::string rep = pinnet::read_file((dir / "certificates.txt").string());
  CHECK(rep.find("[theorem1]") != std::string::npos);
  CHECK(rep.find("pass = true") != std::string::npos);
  CHECK(rep.find("[theorem2]") != std::string::npos);
  CHECK(rep.find("inapplicable") != std::string::npos);
}

TEST_CASE("marginal window fails the mobile check with 2") {
  auto dir = scratch("check_mobile");
  auto r = run("check --config " + mobile_cfg() + " --out " + dir.string());
  CHECK(r.exit_code == 2);
  std::string rep = pinnet::read_file((dir / "certificates.txt").string());
  CHECK(rep.find("window_pass = false") != std::string::npos);
  CHECK(rep.find("feasible = true") != std::string::npos);
  CHECK(rep.find("delta_star") != std::string::npos);
}

TEST_CASE("single run artifacts") {
  auto dir = scratch("simulate");
  auto r = run("simulate --config " + slow_cfg() + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  for (const char* name :
       {"trajectory.csv", "trajectory.gp", "switch_path.csv", "summary.txt"})
    CHECK(fs::exists(dir / name));
  std::string head =
      pinnet::read_file((dir / "trajectory.csv").string()).substr(0, 24);
  CHECK(head == "t,sigma_state,varsigma\n0");
  // No leftover temporaries from the atomic writes.
  for (const auto& e : fs::directory_iterator(dir))
    CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("ensemble summary is reproducible byte for byte") {
  auto dir1 = scratch("mc1");
  auto dir2 = scratch("mc2");
  auto r1 = run("montecarlo --config " + slow_cfg() + " --runs 4 --out " +
                dir1.string());
  auto r2 = run("montecarlo --config " + slow_cfg() + " --runs 4 --out " +
                dir2.string());
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(pinnet::read_file((dir1 / "montecarlo.txt").string()) ==
        pinnet::read_file((dir2 / "montecarlo.txt").string()));
  CHECK(pinnet::read_file((dir1 / "msq.csv").string()) ==
        pinnet::read_file((dir2 / "msq.csv").string()));

  // A different master seed draws different switching rates.
  auto dir3 = scratch("mc3");
  auto r3 = run("montecarlo --config " + slow_cfg() + " --runs 4 --seed 99" +
                " --out " + dir3.string());
  CHECK(r3.exit_code == 0);
  CHECK(pinnet::read_file((dir1 / "montecarlo.txt").string()) !=
        pinnet::read_file((dir3 / "montecarlo.txt").string()));
}

TEST_CASE("motion statistics artifacts") {
  auto dir = scratch("mobility");
  auto r = run("mobility --config " + mobile_cfg() + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "positions.csv"));
  CHECK(fs::exists(dir / "positions.gp"));
  CHECK(fs::exists(dir / "mobility.txt"));
  std::string rep = pinnet::read_file((dir / "mobility.txt").string());
  CHECK(rep.find("pin_fraction") != std::string::npos);
  CHECK(rep.find("link_frequency_theory") != std::string::npos);

  // The subcommand needs motion parameters.
  auto r2 = run("mobility --config " + slow_cfg() + " --out " + dir.string());
  CHECK(r2.exit_code == 1);
}

TEST_CASE("mobile single run converges over a long horizon") {
  auto dir = scratch("msim");
  auto r = run("simulate --config " + mobile_cfg() + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "positions.csv"));
  std::string summary = pinnet::read_file((dir / "summary.txt").string());
  CHECK(summary.find("diverged = false") != std::string::npos);
  auto pos = summary.find("vs_ratio = ");
  REQUIRE(pos != std::string::npos);
  double ratio = std::stod(summary.substr(pos + 11));
  CHECK(ratio < 1e-2);
}
