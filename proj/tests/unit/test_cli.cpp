#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome tfham(const std::string& args) {
  static int counter = 0;
  const std::string path = "tfham_cli_test_" + std::to_string(counter++) + ".out";
  const std::string cmd = std::string(TFHAM_CLI_PATH) + " " + args + " > " + path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::remove(path.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

} // namespace

TEST_SUITE("cli") {
  TEST_CASE("solve") {
    auto r = tfham("solve --alpha 3/4 --beta 1 --gamma 1 --h -4/5 --order 10");
    CHECK(r.code == 0);
    CHECK(r.out.find("\"slope\": \"-1.5462803") != std::string::npos);
    CHECK(r.out.find("seconds_per_order") == std::string::npos);
    auto liao = tfham("solve --alpha 1 --beta 1 --gamma 1 --h -1/2 --order 0");
    CHECK(liao.out.find("\"slope\": \"-1\"") != std::string::npos);
    auto exact = tfham("--mode exact solve --alpha 1 --h -1/2 --order 1 --eval-grid 1 --format csv");
    CHECK(exact.code == 0);
    CHECK(exact.out == "x,u_ham\n1,41/96\n");
  }

  TEST_CASE("identical flags give identical output") {
    const std::string args = "solve --alpha 3/4 --h -3/4 --order 6 --eval-grid 0:2:1/2";
    CHECK(tfham(args).out == tfham(args).out);
    const std::string hc = "hcurve --samples 4 --order 4 --precision 128";
    CHECK(tfham(hc).out == tfham(hc).out);
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(tfham("solve --gamma 0").code == 2);
    CHECK(tfham("solve --alpha abc").code == 2);
    CHECK(tfham("solve --h 1/2").code == 2);
    CHECK(tfham("solve --alpha 1/0").code == 2);
    CHECK(tfham("solve --no-such-flag").code == 2);
    CHECK(tfham("--mode exact solve --alpha 3/4 --gamma 1/2").code == 2);
    CHECK(tfham("hcurve --h-min -0.5 --h-max -0.8").code == 2);
    CHECK(tfham("reproduce nonsense").code == 2);
    CHECK(tfham("").code == 2);
    CHECK(tfham("--help").code == 0);
  }

  TEST_CASE("computation failures exit with 3") {
    CHECK(tfham("reference --bracket -1.4 -1.3").code == 3);
  }

  TEST_CASE("reference") {
    auto r = tfham("reference --bracket -1.6 -1.5");
    CHECK(r.code == 0);
    CHECK(r.out.find("\"slope\": \"-1.58807") != std::string::npos);
    auto csv = tfham("reference --format csv");
    CHECK(csv.out.rfind("x,u_ref\n0,1\n", 0) == 0);
  }

  TEST_CASE("pade") {
    auto r = tfham("pade --m 10 --alpha 3/4 --h -3/4");
    CHECK(r.code == 0);
    CHECK(r.out.find("\n10,-1.5803037") != std::string::npos);
    CHECK(r.out.find(",match\n") != std::string::npos);
    auto zero = tfham("pade --m 0");
    CHECK(zero.code == 0);
    CHECK(zero.out.find("\n0,-1.333333") != std::string::npos);
  }

  TEST_CASE("reproduce exit status reflects verdicts") {
    auto t2 = tfham("reproduce table2 --max-m 10");
    CHECK(t2.code == 0);
    CHECK(t2.out.find("\n10,-1.5803") != std::string::npos);
    auto t1 = tfham("reproduce table1 --max-order 20");
    CHECK(t1.code == 0);
    CHECK(t1.out.find("\n20,-1.56597") != std::string::npos);
    // The caption's h leaves the published digits out of reach.
    CHECK(tfham("reproduce table1 --max-order 20 --table1-h -3/4").code == 1);
  }
}
