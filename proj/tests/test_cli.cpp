#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <Eigen/Dense>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "linsat/constraints.hpp"
#include "linsat/io.hpp"

using namespace linsat;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("LINSAT_CLI");
  REQUIRE_MESSAGE(p != nullptr, "LINSAT_CLI must point at the command-line binary");
  return p;
}

int run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path scratch_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("cli_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LinearConstraintSystem four_packing() {
  LinearConstraintSystem sys;
  sys.l = 4;
  sys.packing.push_back({vec({1, 1, 0, 0}), 1.0});
  sys.packing.push_back({vec({0, 0, 1, 1}), 1.0});
  sys.packing.push_back({vec({1, 0, 1, 0}), 1.0});
  sys.packing.push_back({vec({0, 1, 0, 1}), 1.0});
  return sys;
}

}  // namespace

TEST_CASE("project: feasible system exits 0 and writes the expected point") {
  auto dir = scratch_dir("project");
  write_text_atomic((dir / "sys.json").string(), system_to_json(four_packing()));
  write_csv_matrix((dir / "y.csv").string(),
                   Eigen::RowVector4d(3, -3, -3, 3));

  int rc = run("project --constraints " + (dir / "sys.json").string() + " --y " +
               (dir / "y.csv").string() + " --tau 0.01 --tol 1e-4 --max-iters 20000 --out " +
               (dir / "out").string());
  CHECK(rc == 0);

  Eigen::MatrixXd x = read_csv_matrix((dir / "out/x.csv").string());
  REQUIRE(x.size() == 4);
  CHECK(x(0) > 0.95);
  CHECK(x(1) < 0.05);
  CHECK(x(2) < 0.05);
  CHECK(x(3) > 0.95);
  CHECK(fs::exists(dir / "out/report.json"));
  CHECK(fs::exists(dir / "out/manifest.json"));
}

TEST_CASE("project: infeasible marginals exit 2") {
  // Covering rows demand all four variables at 1 while packing rows cap
  // opposite pairs at 1; no point satisfies both.
  LinearConstraintSystem sys;
  sys.l = 4;
  sys.covering.push_back({vec({1, 1, 0, 0}), 2.0});
  sys.covering.push_back({vec({0, 0, 1, 1}), 2.0});
  sys.packing.push_back({vec({1, 0, 1, 0}), 1.0});
  sys.packing.push_back({vec({0, 1, 0, 1}), 1.0});

  auto dir = scratch_dir("infeasible");
  write_text_atomic((dir / "sys.json").string(), system_to_json(sys));
  write_csv_matrix((dir / "y.csv").string(), Eigen::RowVector4d(1, 1, 1, 1));

  int rc = run("project --constraints " + (dir / "sys.json").string() + " --y " +
               (dir / "y.csv").string() + " --max-iters 200 --out " + (dir / "out").string());
  CHECK(rc == 2);
  CHECK(fs::exists(dir / "out/x.csv"));  // best-effort point is still written
}

TEST_CASE("project: malformed inputs exit 1") {
  auto dir = scratch_dir("malformed");
  write_text_atomic((dir / "sys.json").string(), "{ not json");
  write_csv_matrix((dir / "y.csv").string(), Eigen::RowVector4d(1, 1, 1, 1));
  CHECK(run("project --constraints " + (dir / "sys.json").string() + " --y " +
            (dir / "y.csv").string() + " --out " + (dir / "out").string()) == 1);

  // Negative coefficients fail validation.
  LinearConstraintSystem sys;
  sys.l = 2;
  sys.packing.push_back({vec({1, -1}), 1.0});
  write_text_atomic((dir / "bad.json").string(), system_to_json(sys));
  CHECK(run("project --constraints " + (dir / "bad.json").string() + " --y " +
            (dir / "y.csv").string() + " --out " + (dir / "out").string()) == 1);

  CHECK(run("project --constraints " + (dir / "missing.json").string() + " --y " +
            (dir / "y.csv").string() + " --out " + (dir / "out").string()) == 1);
}

TEST_CASE("grad-check subcommand passes and reruns byte-identically") {
  auto dir_a = scratch_dir("grad_a");
  auto dir_b = scratch_dir("grad_b");
  std::string args = "grad-check --l 6 --k 3 --seed 42 --out ";
  CHECK(run(args + dir_a.string()) == 0);
  CHECK(run(args + dir_b.string()) == 0);

  std::string rep_a = read_text((dir_a / "grad_check.json").string());
  CHECK(rep_a == read_text((dir_b / "grad_check.json").string()));
  CHECK(rep_a.find("max_rel_err") != std::string::npos);
}

TEST_CASE("project reruns are byte-identical") {
  auto dir = scratch_dir("repro");
  write_text_atomic((dir / "sys.json").string(), system_to_json(four_packing()));
  write_csv_matrix((dir / "y.csv").string(), Eigen::RowVector4d(0.2, -0.1, 0.4, 0.3));
  std::string common = "project --constraints " + (dir / "sys.json").string() + " --y " +
                       (dir / "y.csv").string() + " --out ";
  CHECK(run(common + (dir / "a").string()) == 0);
  CHECK(run(common + (dir / "b").string()) == 0);
  CHECK(read_text((dir / "a/x.csv").string()) == read_text((dir / "b/x.csv").string()));
  CHECK(read_text((dir / "a/report.json").string()) ==
        read_text((dir / "b/report.json").string()));
}

TEST_CASE("unknown subcommand exits non-zero") {
  CHECK(run("definitely-not-a-command") != 0);
}
