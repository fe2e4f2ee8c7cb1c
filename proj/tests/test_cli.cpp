#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "parafrac/cli.hpp"

namespace {

std::string cfg(const std::string& name) {
  return std::string(PARAFRAC_CONFIG_DIR) + "/" + name;
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "parafrac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      parafrac::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("validate: bundled configs pass, overlap fails naming A3") {
  const auto ok = run_cli({"validate", cfg("middle_third_cantor.json")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("A3' disjoint interiors,pass") != std::string::npos);

  const auto bad = run_cli({"validate", cfg("overlapping_bad.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("A3") != std::string::npos);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("validate reports the right MP branch as hyperbolic index") {
  const auto r = run_cli({"validate", cfg("figure1_left.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("hyperbolic_index,pass,i0=") != std::string::npos);
}

TEST_CASE("missing config exits 2") {
  const auto r = run_cli({"validate", "/nonexistent.json"});
  CHECK(r.code == 2);
}

TEST_CASE("spectrum: oracle rows and q=0 labeled as box dimension") {
  const auto r = run_cli({"spectrum", cfg("middle_third_cantor.json"), "--q",
                          "0,1,2", "--level", "6", "--tol", "1e-10"});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "q,tau,method,level,mode,gap,note");

  const double dim = std::log(2.0) / std::log(3.0);
  auto tau_of = [](const std::string& row) {
    const auto c1 = row.find(',');
    const auto c2 = row.find(',', c1 + 1);
    return std::stod(row.substr(c1 + 1, c2 - c1 - 1));
  };
  std::getline(is, line);
  CHECK(line.find("0,") == 0);
  CHECK(tau_of(line) == doctest::Approx(dim).epsilon(1e-8));
  CHECK(line.find("box_dim") != std::string::npos);
  std::getline(is, line);
  CHECK(line.find("1,") == 0);
  CHECK(std::abs(tau_of(line)) <= 1e-8);
  std::getline(is, line);
  CHECK(line.find("2,") == 0);
  CHECK(tau_of(line) == doctest::Approx(-dim).epsilon(1e-8));
}

TEST_CASE("spectrum and moments are byte-identical across runs") {
  const std::vector<std::string> spectrum_args = {
      "spectrum", cfg("mp_cantor_09.json"), "--q", "0,0.5,1", "--induced", "20",
      "--seed", "7"};
  const auto a = run_cli(spectrum_args);
  const auto b = run_cli(spectrum_args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const std::vector<std::string> moment_args = {
      "moments", cfg("middle_third_cantor.json"), "--q", "0,1,2",
      "--delta", "3^-3..3^-5", "--estimator", "chaos", "--seed", "21"};
  const auto c = run_cli(moment_args);
  const auto d = run_cli(moment_args);
  CHECK(c.code == 0);
  CHECK(c.out == d.out);
}

TEST_CASE("moments CSV carries the truncated mass column") {
  const auto r = run_cli({"moments", cfg("middle_third_cantor.json"), "--q", "0,1",
                          "--delta", "3^-3..3^-4"});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "delta,q,D,estimator,truncated_mass");
  int rows = 0;
  while (std::getline(is, line)) {
    CHECK(line.find("stopping_pushforward") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("compare passes on the ratio-1/2 interval system") {
  const auto r = run_cli({"compare", cfg("two_half_interval.json"), "--q", "0,1,2",
                          "--delta", "3^-3..3^-6", "--ctol", "0.03"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("compare passes on the middle-third Cantor set at tol 0.03") {
  const auto r = run_cli({"compare", cfg("middle_third_cantor.json"), "--q", "0,1,2",
                          "--delta", "3^-3..3^-7", "--ctol", "0.03"});
  CHECK(r.code == 0);
}

TEST_CASE("render writes a parseable PGM and rejects cantor configs") {
  const std::string path = "/tmp/parafrac_cli_render.pgm";
  const auto r = run_cli({"render", cfg("bedford_mcmullen_2x3.json"), "--mode",
                          "cylinders", "--width", "48", "--height", "48",
                          "--render-level", "1", "--out", path});
  CHECK(r.code == 0);
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::string magic;
  f >> magic;
  CHECK(magic == "P5");
  std::remove(path.c_str());

  const auto bad = run_cli({"render", cfg("middle_third_cantor.json")});
  CHECK(bad.code == 2);
}

TEST_CASE("diagnose-parabolic traces MP and rejects hyperbolic configs") {
  const auto r = run_cli({"diagnose-parabolic", cfg("mp_cantor_09.json"),
                          "--depths", "50,100,200"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("n,radius,exponent") == 0);
  CHECK(r.out.find("# max_exponent,") != std::string::npos);

  const auto bad = run_cli({"diagnose-parabolic", cfg("middle_third_cantor.json")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("parabolic") != std::string::npos);
}

TEST_CASE("table-measure configs run through the whole pipeline") {
  const auto v = run_cli({"validate", cfg("middle_third_table.json")});
  CHECK(v.code == 0);

  const auto s = run_cli({"spectrum", cfg("middle_third_table.json"), "--q",
                          "0,1,2", "--level", "6"});
  REQUIRE(s.code == 0);
  // q=0 counts cylinders regardless of the mass table: still log2/log3
  std::istringstream is(s.out);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  const auto c1 = row.find(',');
  const double tau0 = std::stod(row.substr(c1 + 1));
  CHECK(tau0 == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-6));

  const auto m = run_cli({"moments", cfg("middle_third_table.json"), "--q", "0,1",
                          "--delta", "3^-3..3^-4"});
  CHECK(m.code == 0);
}

TEST_CASE("budget scaling keeps commands usable at reduced depth") {
  const auto r = run_cli({"spectrum", cfg("middle_third_cantor.json"), "--q", "0,2",
                          "--budget", "0.001"});
  CHECK(r.code == 0);
}
