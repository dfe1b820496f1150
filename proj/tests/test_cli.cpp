// Exercises the installed CLI binary end to end (path supplied via the
// MESHSMOOTH_CLI environment variable by ctest).

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

std::string cli() {
  const char* path = std::getenv("MESHSMOOTH_CLI");
  REQUIRE(path != nullptr);
  return path;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("meshsmooth_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const int status = std::system((cli() + " " + args + " >/dev/null 2>&1").c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args, const std::string& stdout_file) {
  const int status =
      std::system((cli() + " " + args + " >" + stdout_file + " 2>/dev/null").c_str());
  REQUIRE(status != -1);
  REQUIRE(WEXITSTATUS(status) == 0);
  std::ifstream in(stdout_file);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("cli happy path: gen then smooth") {
  TempDir tmp;
  const std::string mesh = tmp.file("grid.obj");
  const std::string smoothed = tmp.file("smoothed.obj");
  REQUIRE(run("gen --kind tri-grid --nx 9 --ny 9 --perturb 0.3 --seed 5 --output " + mesh) == 0);
  CHECK(run("smooth --input " + mesh + " --output " + smoothed +
            " --mode planar --method mdm --report " + tmp.file("r.json")) == 0);
  CHECK(std::filesystem::exists(smoothed));
  CHECK(std::filesystem::exists(tmp.file("r.json")));
}

TEST_CASE("cli rejects surface mode on flat input without --force") {
  TempDir tmp;
  const std::string mesh = tmp.file("flat.obj");
  REQUIRE(run("gen --kind quad-grid --nx 5 --ny 5 --output " + mesh) == 0);
  CHECK(run("smooth --input " + mesh + " --output " + tmp.file("out.obj") +
            " --mode surface") == 1);
  CHECK(run("smooth --input " + mesh + " --output " + tmp.file("out.obj") +
            " --mode surface --force") == 0);
}

TEST_CASE("cli input errors exit with 1") {
  TempDir tmp;
  CHECK(run("smooth --input " + tmp.file("nope.obj") + " --output " + tmp.file("o.obj")) == 1);
  CHECK(run("quality --input " + tmp.file("nope.obj")) == 1);
  CHECK(run("gen --kind tri-grid --nx 1 --ny 5 --output " + tmp.file("g.obj")) == 1);
  // Unknown flags are rejected by the parser (CLI11 exit code).
  CHECK(run("gen --does-not-exist 1 --output " + tmp.file("g.obj")) != 0);
}

TEST_CASE("cli reports non-convergence with exit 2 but still writes") {
  TempDir tmp;
  const std::string mesh = tmp.file("grid.obj");
  const std::string out = tmp.file("out.obj");
  REQUIRE(run("gen --kind quad-grid --nx 12 --ny 12 --perturb 0.35 --seed 6 --output " + mesh) ==
          0);
  CHECK(run("smooth --input " + mesh + " --output " + out + " --max-iter 3") == 2);
  CHECK(std::filesystem::exists(out));
}

TEST_CASE("cli quality output matches the library summary") {
  TempDir tmp;
  const std::string mesh = tmp.file("grid.obj");
  REQUIRE(run("gen --kind quad-grid --nx 3 --ny 3 --output " + mesh) == 0);
  const std::string text = run_capture("quality --input " + mesh, tmp.file("q.txt"));
  CHECK(text.find("quad(4) mq=1.000000 mse=0.000000") != std::string::npos);
}

TEST_CASE("cli classify prints node labels") {
  TempDir tmp;
  const std::string mesh = tmp.file("surf.obj");
  REQUIRE(run("gen --kind tri-grid --nx 5 --ny 5 --lift sinx-cosy --output " + mesh) == 0);
  const std::string text = run_capture("classify --input " + mesh, tmp.file("c.txt"));
  CHECK(text.find("0 boundary") != std::string::npos);
  CHECK(text.find("smooth") != std::string::npos);
}

TEST_CASE("cli generation is byte-identical per seed") {
  TempDir tmp;
  const std::string a = tmp.file("a.obj"), b = tmp.file("b.obj");
  REQUIRE(run("gen --kind tri-dominant --nx 8 --ny 8 --perturb 0.3 --seed 11 --output " + a) == 0);
  REQUIRE(run("gen --kind tri-dominant --nx 8 --ny 8 --perturb 0.3 --seed 11 --output " + b) == 0);
  CHECK(slurp(a) == slurp(b));
}
