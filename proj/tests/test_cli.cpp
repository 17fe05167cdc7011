#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

const std::string kCli = MODFORM_CLI_PATH;
const std::string kConfigs = MODFORM_CONFIG_DIR;

int run(const std::string& args) {
  std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("check command exit codes") {
  CHECK(run("check -c " + kConfigs + "/inner_m2.json -o /tmp/cli_inner.json") == 0);
  CHECK(run("check -c " + kConfigs + "/broken_jmap.json -o /tmp/cli_broken.json") == 1);
  CHECK(run("check -c /tmp/definitely_missing.json") == 2);

  std::ofstream("/tmp/cli_bad.json") << "{ not json";
  CHECK(run("check -c /tmp/cli_bad.json") == 2);

  // The failing run names its failing checks.
  nlohmann::json rep = nlohmann::json::parse(slurp("/tmp/cli_broken.json"));
  bool found_named_failure = false;
  for (const auto& c : rep.at("checks"))
    if (!c.at("pass").get<bool>() && !c.at("name").get<std::string>().empty())
      found_named_failure = true;
  CHECK(found_named_failure);
}

TEST_CASE("check reports are byte-identical under a fixed seed") {
  REQUIRE(run("check -c " + kConfigs + "/cocycle_z2.json -o /tmp/cli_a.json") == 0);
  REQUIRE(run("check -c " + kConfigs + "/cocycle_z2.json -o /tmp/cli_b.json") == 0);
  CHECK(slurp("/tmp/cli_a.json") == slurp("/tmp/cli_b.json"));
}

TEST_CASE("semigroup CSV: header, monotone energy, determinism") {
  std::string base = "semigroup -c " + kConfigs + "/inner_m2.json --t-grid 0:2:0.25";
  REQUIRE(run(base + " -o /tmp/cli_sg.csv") == 0);
  REQUIRE(run(base + " -o /tmp/cli_sg2.csv") == 0);
  std::string csv = slurp("/tmp/cli_sg.csv");
  CHECK(csv == slurp("/tmp/cli_sg2.csv"));

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,min_choi_eig,unitality_defect,symmetry_residual,energy");

  double prev_energy = 0;
  bool first = true;
  int rows = 0;
  while (std::getline(lines, line)) {
    double t, choi, unital, sym, energy;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &choi, &unital,
                        &sym, &energy) == 5);
    CHECK(choi > -1e-10);
    CHECK(unital < 1e-10);
    CHECK(sym < 1e-9);
    if (!first) CHECK(energy <= prev_energy + 1e-12);
    prev_energy = energy;
    first = false;
    ++rows;
  }
  CHECK(rows == 9);

  CHECK(run("semigroup -c " + kConfigs + "/inner_m2.json --t-grid 2:1:0.5") == 2);
}

TEST_CASE("scan-kms CSV: determinism, labels, empty scan") {
  std::string base = "scan-kms --dim 2 --num-v 2 --trials 12 --seed 5";
  REQUIRE(run(base + " -o /tmp/cli_scan.csv") == 0);
  REQUIRE(run(base + " -o /tmp/cli_scan2.csv") == 0);
  CHECK(slurp("/tmp/cli_scan.csv") == slurp("/tmp/cli_scan2.csv"));
  CHECK(slurp("/tmp/cli_scan.csv.violations.json") ==
        slurp("/tmp/cli_scan2.csv.violations.json"));

  REQUIRE(run("scan-kms --dim 2 --num-v 1 --trials 0 --seed 1 -o /tmp/cli_scan0.csv") == 0);
  CHECK(slurp("/tmp/cli_scan0.csv") == "trial,label,min_choi_eig,dirichlet_margin\n");

  CHECK(run("scan-kms --dim 1 --num-v 1 --trials 1 --seed 1") == 2);
}
