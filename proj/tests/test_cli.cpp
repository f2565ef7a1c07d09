#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string cli = WEYLLAB_BINARY;
const std::string configs = WEYLLAB_CONFIGS;

int run(const std::string& args) {
  const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("validate " + configs + "/harmonic_gaussian.json") == 0);
  CHECK(run("--bogus validate " + configs + "/harmonic_gaussian.json") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
  CHECK(run("validate /nonexistent.json") == 2);
  CHECK(run("scf " + configs + "/harmonic_gaussian.json --hbar -1") == 2);

  const auto dir = std::filesystem::temp_directory_path() / "weyl_cli_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "attractive.json") << R"({"grid": {"dim": 1, "half_width": 2.5}, "chemical_potential": 1,
    "potential": {"kind": "harmonic"}, "interaction": {"kind": "gaussian", "a": -1, "sigma": 1}})";
  CHECK(run("validate " + (dir / "attractive.json").string()) == 2);
  CHECK(run("scf " + (dir / "attractive.json").string()) == 2);

  std::ofstream(dir / "short.json") << R"({"grid": {"dim": 1, "half_width": 2.5}, "chemical_potential": 1,
    "potential": {"kind": "harmonic"}, "interaction": {"kind": "gaussian", "a": 1, "sigma": 1},
    "scf": {"max_iters": 1}})";
  CHECK(run("scf " + (dir / "short.json").string() + " --hbar 0.2") == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("single-run subcommands succeed on the shipped configs") {
  CHECK(run("scf " + configs + "/harmonic_gaussian.json --hbar 0.2") == 0);
  CHECK(run("scf " + configs + "/harmonic_gaussian.json --hbar 0.2 --reduced --format csv") == 0);
  CHECK(run("heat " + configs + "/harmonic_gaussian.json --format csv") == 0);
  CHECK(run("husimi " + configs + "/harmonic_gaussian.json --hbar 0.2 --reduced") == 0);
  CHECK(run("manybody " + configs + "/harmonic_gaussian.json --hbar 0.4") == 0);
  CHECK(run("tf " + configs + "/harmonic_gaussian.json --trials 3 --seed 5") == 0);
}

TEST_CASE("sweep writes reproducible outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "weyl_cli_sweep";
  std::filesystem::remove_all(dir);
  std::ofstream plan(std::filesystem::temp_directory_path() / "weyl_cli_plan.json");
  plan << R"({"model_file": ")" << configs << R"(/harmonic_free.json", "hbar": [0.2, 0.1, 0.05],
    "solvers": ["rhf", "tf"], "probes": [0.0, 0.9, 1.5]})";
  plan.close();
  const std::string path = (std::filesystem::temp_directory_path() / "weyl_cli_plan.json").string();
  REQUIRE(run("sweep " + path + " --out " + (dir / "a").string() + " --plot --threads 2") == 0);
  REQUIRE(run("sweep " + path + " --out " + (dir / "b").string()) == 0);
  for (const char* f : {"records.csv", "summary.json", "pointwise.csv"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  CHECK(std::filesystem::exists(dir / "a" / "plots" / "energy_error.svg"));
  std::istringstream csv(slurp(dir / "a" / "records.csv"));
  int lines = 0;
  for (std::string l; std::getline(csv, l);) ++lines;
  CHECK(lines == 4);
  std::filesystem::remove_all(dir);
}
