#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "thetaquant/types.hpp"

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

// Run the installed binary, capturing stdout; stderr passes through.
RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(THETAQUANT_CLI_PATH) + " " + args;
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

}  // namespace

TEST_CASE("theta eval prints the anchor value") {
  const RunResult r = run_cli("theta eval --omega \"[0,1]\" --tol 1e-13");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j.at("value_re").get<double>() - 1.08643481121331) < 1e-12);
  CHECK(std::abs(j.at("value_im").get<double>()) < 1e-12);
  CHECK(j.at("error_bound").get<double>() < 1e-12);
}

TEST_CASE("siegel cayley chart change") {
  const RunResult r = run_cli("siegel cayley --in \"{\\\"g\\\":1,\\\"Omega\\\":[[[1,1]]]}\"");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto tau = j.at("tau");
  CHECK(std::abs(tau[0][0][0].get<double>() - (-0.2)) < 1e-12);
  CHECK(std::abs(tau[0][0][1].get<double>() - 0.4) < 1e-12);
}

TEST_CASE("verification reports are deterministic and pass") {
  const std::string args = "verify theta --seed 7 --g 1 --k 2";
  const RunResult first = run_cli(args);
  const RunResult second = run_cli(args);
  CHECK(first.status == 0);
  CHECK(first.out == second.out);
  const auto j = nlohmann::json::parse(first.out);
  CHECK(j.at("overall_pass").get<bool>());
  CHECK(j.at("config").at("seed").get<int>() == 7);
  CHECK(j.contains("conventions"));
}

TEST_CASE("divisor emission lists the level-two points") {
  const RunResult r = run_cli("emit tropical_divisor --g 1 --k 2");
  REQUIRE(r.status == 0);
  CHECK(r.out == "y\n0.25\n0.75\n");
}

TEST_CASE("invalid inputs exit with an error status") {
  const RunResult r = run_cli("theta eval --omega \"[0,-1]\" 2>/dev/null");
  CHECK(r.status == 2);
}

TEST_CASE("grid files round-trip through both directions") {
  const std::string dir = "cli_roundtrip";
  std::remove((dir + ".bin").c_str());
  // Build a small section grid by hand: header line plus raw (re, im) pairs.
  const int n = 4;
  {
    std::ofstream f(dir + ".bin", std::ios::binary);
    f << "{\"g\":1,\"k\":1,\"N\":4,\"W\":4,\"h\":4}\n";
    for (int fy = 0; fy < n; ++fy)
      for (int fx = 0; fx < n; ++fx) {
        const double angle = 2.0 * thetaquant::pi * (fx + 2.0 * fy) / n;
        const double re = std::cos(angle) / 3.0, im = std::sin(angle) / 3.0;
        f.write(reinterpret_cast<const char*>(&re), sizeof re);
        f.write(reinterpret_cast<const char*>(&im), sizeof im);
      }
  }
  const RunResult fwd = run_cli("wb forward --in " + dir + ".bin --out " + dir + ".json");
  REQUIRE(fwd.status == 0);
  const RunResult inv = run_cli("wb inverse --in @" + dir + ".json --out " + dir + "2.bin");
  REQUIRE(inv.status == 0);

  std::ifstream a(dir + ".bin", std::ios::binary);
  std::ifstream b(dir + "2.bin", std::ios::binary);
  std::string ha, hb;
  std::getline(a, ha);
  std::getline(b, hb);
  CHECK(ha == hb);
  for (int i = 0; i < 2 * n * n; ++i) {
    double va = 0.0, vb = 0.0;
    a.read(reinterpret_cast<char*>(&va), sizeof va);
    b.read(reinterpret_cast<char*>(&vb), sizeof vb);
    CHECK(std::abs(va - vb) < 1e-12);
  }

  const RunResult check = run_cli("wb check --in " + dir + ".bin");
  CHECK(check.status == 0);
}
