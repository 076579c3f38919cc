// End-to-end checks of the command line tool: subcommands, exit codes, and
// trace output. Shells out to the built binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = OPSPLIT_CLI_PATH;
const std::string kConfigDir = OPSPLIT_CONFIG_DIR;

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = kCli + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("run on the bundled d1 config converges with exit 0") {
  const int code = run_cli("run " + kConfigDir +
                               "/inclusion_d1.json --output cli_t_d1.csv",
                           "cli_run_d1.log");
  CHECK(code == 0);
  const std::string log = read_file("cli_run_d1.log");
  CHECK(log.find("status: converged") != std::string::npos);
  const std::string trace = read_file("cli_t_d1.csv");
  CHECK(trace.rfind(
            "n,residual,outer_gap,error_bound,dist_to_ref,feasibility_max\n",
            0) == 0);
}

TEST_CASE("invalid config exits 1 with an anchored message") {
  write_file("cli_bad_gamma.json", R"({
  "problem": {
    "kind": "inclusion",
    "dim": 1,
    "epsilon": 0.25,
    "operator_a": {"type": "normal_cone",
                   "set": {"type": "box", "lower": [-1], "upper": [1]}},
    "operator_b": {"type": "identity"},
    "constraints": [{"type": "trivial"}]
  },
  "schedules": {"gamma": {"type": "constant", "value": 0.9}},
  "x0": [2.0],
  "output": "unused.csv",
  "seed": 1
})");
  const int code = run_cli("run cli_bad_gamma.json", "cli_bad_gamma.log");
  CHECK(code == 1);
  CHECK(read_file("cli_bad_gamma.log").find("schedules.gamma") !=
        std::string::npos);
}

TEST_CASE("max_iter exhaustion exits 2") {
  write_file("cli_capped.json", R"({
  "problem": {
    "kind": "inclusion",
    "dim": 1,
    "epsilon": 0.25,
    "operator_a": {"type": "normal_cone",
                   "set": {"type": "box", "lower": [-1], "upper": [1]}},
    "operator_b": {"type": "identity"},
    "constraints": [{"type": "trivial"}]
  },
  "schedules": {"gamma": {"type": "constant", "value": 0.5}},
  "stop": {"max_iter": 1},
  "x0": [2.0],
  "output": "cli_capped.csv",
  "seed": 1
})");
  CHECK(run_cli("run cli_capped.json", "cli_capped.log") == 2);
}

TEST_CASE("domain exit exits 3") {
  write_file("cli_domain.json", R"({
  "problem": {
    "kind": "generic",
    "dim": 1,
    "epsilon": 0.25,
    "operator_t": {"type": "resolvent_affine", "matrix": [0.0],
                   "shift": [-10.0], "gamma": 1.0},
    "operator_r": {"type": "forward", "gamma": 0.5,
                   "b": {"type": "identity",
                         "domain": {"type": "box", "lower": [-2],
                                    "upper": [2]}}},
    "outer": {"type": "identity"}
  },
  "stop": {"max_iter": 10},
  "x0": [0.0],
  "output": "cli_domain.csv",
  "seed": 1
})");
  const int code = run_cli("run cli_domain.json", "cli_domain.log");
  CHECK(code == 3);
  CHECK(read_file("cli_domain.log").find("domain_stop") != std::string::npos);
}

TEST_CASE("verify flags an understated lipschitz constant with exit 4") {
  write_file("cli_bad_chi.json", R"({
  "problem": {
    "kind": "inclusion",
    "dim": 2,
    "epsilon": 0.25,
    "operator_a": {"type": "normal_cone",
                   "set": {"type": "box", "lower": [-1,-1], "upper": [1,1]}},
    "operator_b": {"type": "linear", "matrix": [0,-1,1,0], "lipschitz": 0.5},
    "constraints": [{"type": "affine", "normal": [1,1], "offset": 0.0}]
  },
  "schedules": {"gamma": {"type": "constant", "value": 0.5}},
  "x0": [2.0, 2.0],
  "output": "unused.csv",
  "seed": 7
})");
  const int code = run_cli("verify cli_bad_chi.json", "cli_bad_chi.log");
  CHECK(code == 4);
  const std::string log = read_file("cli_bad_chi.log");
  CHECK(log.find("lipschitz") != std::string::npos);
  CHECK(log.find("FAIL") != std::string::npos);
}

TEST_CASE("verify flags a starving index control with exit 4") {
  write_file("cli_starved.json", R"({
  "problem": {
    "kind": "equilibrium",
    "dim": 1,
    "epsilon": 0.25,
    "bifunction": {"type": "dc_quadratic", "alpha": 1.0,
                   "feasible_set": {"type": "whole"}},
    "operator_b": {"type": "identity"},
    "sets": [{"type": "box", "lower": [-10], "upper": [10]},
             {"type": "halfspace", "normal": [1], "offset": 5.0}],
    "index_control": {"type": "explicit", "pattern": [[1]],
                      "window": [2, 2], "max_active": 1}
  },
  "schedules": {"gamma": {"type": "constant", "value": 0.5}},
  "x0": [2.0],
  "output": "unused.csv",
  "seed": 11
})");
  const int code = run_cli("verify cli_starved.json", "cli_starved.log");
  CHECK(code == 4);
  CHECK(read_file("cli_starved.log").find("first violation n=0") !=
        std::string::npos);
}

TEST_CASE("verify passes bundled configs with exit 0") {
  CHECK(run_cli("verify " + kConfigDir + "/equilibrium_d2.json",
                "cli_verify_eq.log") == 0);
  const std::string log = read_file("cli_verify_eq.log");
  CHECK(log.find("bifunction-identity") != std::string::npos);
  CHECK(log.find("index-control") != std::string::npos);
}

TEST_CASE("trace-format prints the column contract") {
  CHECK(run_cli("trace-format", "cli_fmt.log") == 0);
  const std::string log = read_file("cli_fmt.log");
  for (const char* column :
       {"residual", "outer_gap", "error_bound", "dist_to_ref",
        "feasibility_max"}) {
    CHECK(log.find(column) != std::string::npos);
  }
}
