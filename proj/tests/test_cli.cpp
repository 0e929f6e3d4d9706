#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(TODALAB_BIN) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("halt subcommand writes byte-identical files for equal seeds") {
  REQUIRE(run("halt --ensemble GUE --n 8 --eps 1e-6 --trials 5 --seed 3 --out /tmp/cli_a.csv") == 0);
  REQUIRE(run("halt --ensemble GUE --n 8 --eps 1e-6 --trials 5 --seed 3 --workers 2 --out /tmp/cli_b.csv") == 0);
  CHECK(slurp("/tmp/cli_a.csv") == slurp("/tmp/cli_b.csv"));
  CHECK(slurp("/tmp/cli_a.csv").find("t1") != std::string::npos);
}

TEST_CASE("single-trial halt reruns identically") {
  REQUIRE(run("halt --ensemble BOE --n 6 --eps 1e-5 --trials 1 --seed 11 --out /tmp/cli_c.csv") == 0);
  REQUIRE(run("halt --ensemble BOE --n 6 --eps 1e-5 --trials 1 --seed 11 --out /tmp/cli_d.csv") == 0);
  CHECK(slurp("/tmp/cli_c.csv") == slurp("/tmp/cli_d.csv"));
}

TEST_CASE("compare subcommand on a column against itself") {
  REQUIRE(run("compare /tmp/cli_a.csv t1 /tmp/cli_b.csv t1 --bound 0.001") == 0);
}

TEST_CASE("gapdist, khat, table1, hist and prop-error run end to end") {
  CHECK(run("gapdist --ensemble factorized --beta 2 --n 40 --trials 30 --seed 5 --out /tmp/cli_g.csv") == 0);
  CHECK(run("hist /tmp/cli_g.csv value --bins 6 --out /tmp/cli_h.csv") == 0);
  CHECK(slurp("/tmp/cli_h.csv").find("edge_lo") != std::string::npos);
  CHECK(run("khat --ensemble GOE --n 6 --eps 1e-6 --trials 3 --seed 2 --out /tmp/cli_k.csv") == 0);
  CHECK(run("table1 --n-list 16,24 --ensembles GUE,GOE --trials 20 --seed 9 --out /tmp/cli_t.csv") == 0);
  CHECK(slurp("/tmp/cli_t.csv").find("ratio_GUE") != std::string::npos);
  CHECK(run("prop-error --ensemble GUE --n 16 --eps 1e-6 --trials 10 --seed 4") == 0);
}

TEST_CASE("config file plus override") {
  {
    std::ofstream f("/tmp/cli_conf.ini");
    f << "ensemble=GUE\nn=8\neps=1e-6\ntrials=4\nseed=3\n";
  }
  REQUIRE(run("halt --config /tmp/cli_conf.ini --out /tmp/cli_e.csv") == 0);
  REQUIRE(run("halt --config /tmp/cli_conf.ini --trials 2 --out /tmp/cli_f.csv") == 0);
  const auto e = slurp("/tmp/cli_e.csv");
  const auto f = slurp("/tmp/cli_f.csv");
  CHECK(e.find("trials=4") != std::string::npos);
  CHECK(f.find("trials=2") != std::string::npos);
}

TEST_CASE("unknown ensemble fails with a nonzero status") {
  CHECK(run("halt --ensemble nope --n 4 --trials 1") != 0);
}
