#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string command = std::string(CONEHULL_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("sample writes a CSV batch") {
  const Run r = run("sample --body '{\"kind\": \"lp_ball\", \"p\": 1.0, \"dim\": 3}' --dist cone --count 5 --seed 3");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string header, columns, line;
  std::getline(in, header);
  std::getline(in, columns);
  CHECK(header.front() == '#');
  CHECK(nlohmann::json::parse(header.substr(1))["seed"] == 3);
  CHECK(columns == "x1,x2,x3");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
  CHECK(run("sample --body '{\"kind\": \"lp_ball\", \"p\": 1.0, \"dim\": 3}' --dist cone --count 5 --seed 3").out == r.out);
}

TEST_CASE("sample writes to a file") {
  const Run r = run("sample --body '{\"kind\": \"cube\", \"dim\": 2}' --dist uniform --count 4 --out cli_points.csv");
  CHECK(r.code == 0);
  CHECK(slurp("cli_points.csv").find("x1,x2") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("sample --body '{\"kind\": \"banana\", \"dim\": 2}'").code == 2);
  CHECK(run("sample --body '{\"kind\": \"cube\", \"dim\": 2}' --dist nowhere").code == 2);
  CHECK(run("experiment --config does_not_exist.json").code == 2);
  write("cli_empty_schedule.json",
        R"({"experiment": "unconditional", "bodies": [{"kind": "cube"}], "dims": [3], "n_schedule": []})");
  CHECK(run("experiment --config cli_empty_schedule.json").code == 2);
  write("cli_bad.json", "{ not json");
  CHECK(run("experiment --config cli_bad.json").code == 2);
  write("cli_vr.json",
        R"({"experiment": "volume_radius", "bodies": [{"kind": "cube"}], "dims": [3], "n_schedule": ["2n"], "trials": 2})");
  CHECK(run("experiment --config cli_vr.json").code == 2);
  CHECK(run("verify --samples 100 --psi2-constant -1").code == 2);
}

TEST_CASE("experiment and volume-radius subcommands") {
  write("cli_exp.json", R"({"experiment": "unconditional", "bodies": [{"kind": "cross_polytope"}], "dims": [3],
                            "n_schedule": ["2n", "4n"], "trials": 5, "bootstrap_resamples": 100})");
  CHECK(run("experiment --config cli_exp.json --csv cli_exp_1.csv --json cli_exp_1.json").code == 0);
  CHECK(run("experiment --config cli_exp.json --workers 2 --csv cli_exp_2.csv --json cli_exp_2.json").code == 0);
  CHECK(slurp("cli_exp_1.csv") == slurp("cli_exp_2.csv"));
  CHECK(nlohmann::json::parse(slurp("cli_exp_1.json"))["pass"] == true);

  CHECK(run("volume-radius --config cli_vr.json --csv cli_vr.csv").code == 0);
  CHECK(slurp("cli_vr.csv").find("inclusion") != std::string::npos);
}

TEST_CASE("verify exit codes") {
  write("cli_verify.json", R"({"sample_count": 200, "dims": [2], "random_thetas": 1, "polytopes": 1, "resamples": 20})");
  const Run ok = run("verify --config cli_verify.json");
  CHECK(ok.code == 0);
  const auto doc = nlohmann::json::parse(ok.out);
  CHECK(doc["summary"]["hard_failures"] == 0);
  CHECK(doc["summary"]["widened_band"].get<int>() > 0);
  // a sabotaged psi_2 constant is a statistical failure, not a hard one
  CHECK(run("verify --config cli_verify.json --psi2-constant 0.3 --samples 10000").code == 0);
}
