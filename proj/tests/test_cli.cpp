#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

std::string g_cli;  // path to the executable under test, from argv[1]

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  std::string out_path = "cli_stdout.tmp", err_path = "cli_stderr.tmp";
  std::string cmd = g_cli + " " + args + " >" + out_path + " 2>" + err_path;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("locate prints the bifurcation report") {
  RunResult r = run("locate brusselator --alpha-lo 1.5 --alpha-hi 2.5");
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["alpha_star"].get<double>() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(doc["omega0"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(doc["mu_prime"].get<double>() == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(doc["criticality"] == "supercritical");
  CHECK(doc.contains("oigm_gain_jump"));
}

TEST_CASE("locate exit code 2 when mu does not change sign") {
  RunResult r = run("locate brusselator --alpha-lo 1.2 --alpha-hi 1.6");
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("bad usage exits nonzero") {
  CHECK(run("").code != 0);
  CHECK(run("locate").code != 0);                       // missing bracket options
  CHECK(run("locate nosuchmodel --alpha-lo 0 --alpha-hi 1").code == 1);
  CHECK(run("coeffs brusselator --alpha 2 --param A").code == 1);  // malformed --param
}

TEST_CASE("coeffs reports normal-form data") {
  RunResult r = run("coeffs predator-prey --alpha 4.8");
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["mu"].get<double>() > 0);
  CHECK(doc["re_c1"].get<double>() < 0);
  CHECK(doc["K"].size() == 2);
  CHECK(doc["residuals"]["pq_minus_1"].get<double>() <= 1e-12);
}

TEST_CASE("param overrides reach the model") {
  RunResult r = run("locate brusselator --param A=1.5 --alpha-lo 2.5 --alpha-hi 4");
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["alpha_star"].get<double>() == doctest::Approx(3.25).epsilon(1e-8));
}

TEST_CASE("sweep writes a deterministic csv") {
  std::string csv = "cli_sweep_test.csv";
  std::string args = "sweep brusselator --alpha-min 1.9 --alpha-max 2.2 --steps 7 --out " + csv;
  RunResult r = run(args);
  REQUIRE(r.code == 0);
  auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["rows"] == 7);
  CHECK(summary["failures"] == 0);
  CHECK(summary["alpha_star"].get<double>() == doctest::Approx(2.0).epsilon(1e-8));

  auto rows = read_csv(csv);
  REQUIRE(rows.size() == 8);  // header + 7 rows
  CHECK(rows[0][0] == "alpha");
  CHECK(rows[0].back() == "converged");
  CHECK(std::stod(rows[1][0]) == doctest::Approx(1.9));
  CHECK(std::stod(rows[7][0]) == doctest::Approx(2.2));
  // mu column crosses zero inside the grid
  CHECK(std::stod(rows[1][1]) < 0);
  CHECK(std::stod(rows[7][1]) > 0);

  std::string first = slurp(csv);
  RunResult r2 = run(args);
  REQUIRE(r2.code == 0);
  CHECK(slurp(csv) == first);  // byte-identical rerun
  std::remove(csv.c_str());
}

TEST_CASE("numeric sweep matches the analytic columns and parallel runs agree") {
  std::string csv1 = "cli_sweep_num1.csv", csv2 = "cli_sweep_num2.csv";
  std::string base =
      "sweep brusselator --alpha-min 2.02 --alpha-max 2.1 --steps 3 --numeric --out ";
  RunResult r = run(base + csv1);
  REQUIRE(r.code == 0);
  auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["max_residual"].get<double>() < 0.01);
  CHECK(summary.contains("tangency_ratio"));
  double tr = summary["tangency_ratio"].get<double>();
  CHECK(tr > 0.5);
  CHECK(tr < 2.0);

  RunResult r4 = run(base + csv2 + " --jobs 4");
  REQUIRE(r4.code == 0);
  CHECK(slurp(csv1) == slurp(csv2));  // worker count must not change results

  auto rows = read_csv(csv1);
  REQUIRE(rows.size() == 4);
  // numeric mean close to predicted mean on every row
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      double pred = std::stod(rows[i][static_cast<std::size_t>(5 + k)]);
      double num = std::stod(rows[i][static_cast<std::size_t>(7 + k)]);
      CHECK(num == doctest::Approx(pred).epsilon(0.02));
    }
    CHECK(rows[i].back() == "1");
  }
  std::remove(csv1.c_str());
  std::remove(csv2.c_str());
}

TEST_CASE("verify reports tangency on the brusselator") {
  RunResult r =
      run("verify brusselator --mu-list 0.01,0.02 --alpha-lo 1.5 --alpha-hi 2.5");
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["points"].size() == 2);
  for (const auto& pt : doc["points"]) CHECK(pt["converged"] == true);
  double order = doc["residual_order"][0].get<double>();
  CHECK(order > 1.6);
  CHECK(order < 2.4);
  double amp = doc["amplitude_exponent"].get<double>();
  CHECK(amp > 0.45);
  CHECK(amp < 0.55);
  CHECK(doc["max_period_rel_err"].get<double>() < 0.02);
}

TEST_CASE("custom field file flows through every command") {
  const char* text = R"({
    "name": "custom-osc",
    "dimension": 2,
    "parameters": {"A": 1.0, "alpha": 2.0},
    "bifurcation_parameter": "alpha",
    "equations": ["A - (alpha+1)*x1 + x1^2*x2", "alpha*x1 - x1^2*x2"]
  })";
  std::string path = "cli_custom_model.json";
  std::ofstream(path) << text;
  RunResult r = run("locate --field-file " + path +
                    " --guess 1,2 --alpha-lo 1.5 --alpha-hi 2.5");
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["alpha_star"].get<double>() == doctest::Approx(2.0).epsilon(1e-8));

  RunResult c = run("coeffs --field-file " + path + " --guess 1,2 --alpha 2.05");
  REQUIRE(c.code == 0);
  auto cdoc = nlohmann::json::parse(c.out);
  CHECK(cdoc["mu"].get<double>() == doctest::Approx(0.025).epsilon(1e-6));
  std::remove(path.c_str());

  CHECK(run("locate --field-file missing.json --alpha-lo 0 --alpha-hi 1").code == 1);
}

int main(int argc, char** argv) {
  if (argc > 1 && argv[1][0] != '-') g_cli = argv[1];
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli>\n");
    return 1;
  }
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
