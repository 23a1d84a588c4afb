// Runs the CLI binary and checks its outputs and exit codes.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#ifndef RECTFREE_CLI
#error "RECTFREE_CLI must name the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(RECTFREE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Linear interpolation in an x,density table.
double density_at(const std::string& csv, double x) {
  std::vector<double> xs, fs;
  auto ls = lines(csv);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    double a, b;
    if (std::sscanf(ls[i].c_str(), "%lf,%lf", &a, &b) == 2) {
      xs.push_back(a);
      fs.push_back(b);
    }
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i] <= x && x <= xs[i + 1]) {
      double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
      return (1 - t) * fs[i] + t * fs[i + 1];
    }
  return NAN;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("rectfree_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("law rect-gaussian at λ = 1 is the semicircle") {
  Run r = run("law rect-gaussian --lambda 1");
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).front() == "x,density");
  CHECK(std::abs(density_at(r.out, 0.0) - 1.0 / std::numbers::pi) < 1e-6);
}

TEST_CASE("nc tables") {
  Run r = run("nc --op pairings --n 6");
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 1 + 5);
  CHECK(lines(run("nc --op partitions --n 4").out).size() == 1 + 14);
  Run mp = run("nc --op mp-moments --n 3 --param 1");
  REQUIRE(mp.code == 0);
  CHECK(lines(mp.out).back() == "3,5");
}

TEST_CASE("exit codes") {
  CHECK(run("nc --op pairings --n 5").code == 1);
  CHECK(run("law rect-gaussian --lambda 2").code == 1);
  CHECK(run("bogus").code == 1);
  CHECK(run("--help").code == 0);
  TempDir tmp;
  fs::path bad = tmp.path / "bad.json";
  std::ofstream(bad) << R"({"atoms": [[1, 1]]})";
  CHECK(run("convolve --mu " + bad.string() + " --nu " + bad.string() + " --lambda 0.5").code == 1);
}

TEST_CASE("convolve with δ0 reproduces the law file") {
  TempDir tmp;
  fs::path law = tmp.path / "g.json";
  fs::path zero = tmp.path / "zero.json";
  fs::path out = tmp.path / "out.json";
  REQUIRE(run("law rect-gaussian --lambda 0.5 --out " + (tmp.path / "g.csv").string() + " --json " + law.string())
              .code == 0);
  std::ofstream(zero) << R"({"atoms": [[0, 1]], "grid": [], "density": []})";
  REQUIRE(run("convolve --mu " + zero.string() + " --nu " + law.string() + " --lambda 0.5 --out " + out.string())
              .code == 0);
  CHECK(slurp(out) == slurp(law));
}

TEST_CASE("infdiv and law atoms") {
  TempDir tmp;
  fs::path levy = tmp.path / "levy.json";
  std::ofstream(levy) << R"({"atoms": [[0, 1]]})";
  Run r = run("infdiv --levy " + levy.string() + " --lambda 1");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"density\"") != std::string::npos);

  fs::path atoms = tmp.path / "atoms.json";
  REQUIRE(run("law mp --param 0.5 --out " + (tmp.path / "mp.csv").string() + " --atoms " + atoms.string()).code == 0);
  std::string text = slurp(atoms);
  std::size_t at = text.find("[[0.0,");
  REQUIRE(at != std::string::npos);
  CHECK(std::abs(std::stod(text.substr(at + 6)) - 0.5) < 1e-12);
}

TEST_CASE("mc output is identical across thread counts") {
  TempDir tmp;
  std::string common = "mc --kind gaussian --d 20 --dprime 40 --trials 12 --seed 7 --kmax 4";
  fs::path a = tmp.path / "a.json";
  fs::path b = tmp.path / "b.json";
  REQUIRE(run(common + " --threads 1 --out " + a.string()).code == 0);
  REQUIRE(run(common + " --threads 4 --out " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("\"seed\": 7") != std::string::npos);
  CHECK(run("mc --kind biinv --d 4 --dprime 6").code == 1);
  CHECK(run("mc --d 6 --dprime 4").code == 1);
}
