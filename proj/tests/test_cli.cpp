#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mixlap/cli.hpp"

using namespace mixlap;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/mixlap_cli_test_") + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

}  // namespace

TEST_CASE("defaults parse to a solve run on (0,1)") {
  const RunConfig cfg = parse_config({});
  CHECK(cfg.mode == RunMode::solve);
  CHECK(cfg.p == std::vector<double>{2.0});
  CHECK(cfg.q == std::vector<double>{2.0});
  CHECK(cfg.s == std::vector<double>{0.5});
  CHECK(cfg.nodes == 100);
  CHECK(cfg.tol == 1e-8);
  CHECK(cfg.format == OutputFormat::json);
}

TEST_CASE("explicit flags override the defaults") {
  const RunConfig cfg = parse_config({"--p", "2.5", "--q", "1.8", "--s", "0.3", "--nodes", "64",
                                      "--tol", "1e-6", "--mode", "diagnose", "--format", "csv",
                                      "--seed", "7"});
  CHECK(cfg.mode == RunMode::diagnose);
  CHECK(cfg.p == std::vector<double>{2.5});
  CHECK(cfg.q == std::vector<double>{1.8});
  CHECK(cfg.s == std::vector<double>{0.3});
  CHECK(cfg.nodes == 64);
  CHECK(cfg.tol == 1e-6);
  CHECK(cfg.seed == 7);
  CHECK(cfg.format == OutputFormat::csv);
}

TEST_CASE("inadmissible exponents are usage errors") {
  CHECK_THROWS_WITH_AS(parse_config({"--p", "1"}),
                       doctest::Contains("p"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--s", "1.0"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--q", "0.5"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--tol", "0"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--nodes", "1"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--a", "1", "--b", "0"}), std::invalid_argument);
}

TEST_CASE("energy-term toggles are mutually exclusive") {
  CHECK_NOTHROW(parse_config({"--local-only"}));
  CHECK_NOTHROW(parse_config({"--nonlocal-only"}));
  CHECK_THROWS_AS(parse_config({"--local-only", "--nonlocal-only"}), std::invalid_argument);
}

TEST_CASE("comma lists are reserved for sweep mode") {
  CHECK_THROWS_AS(parse_config({"--p", "1.5,2.0"}), std::invalid_argument);
  const RunConfig cfg = parse_config({"--mode", "sweep", "--p", "1.5,2.0,3.0", "--s", "0.3,0.7"});
  CHECK(cfg.p == std::vector<double>({1.5, 2.0, 3.0}));
  CHECK(cfg.s == std::vector<double>({0.3, 0.7}));
  CHECK_THROWS_AS(parse_config({"--mode", "sweep", "--p", "2.0,,3.0"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--mode", "sweep", "--p", "2.0,abc"}), std::invalid_argument);
}

TEST_CASE("unknown flags and modes are rejected") {
  CHECK_THROWS_AS(parse_config({"--frobnicate", "1"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--mode", "dance"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({"--format", "xml"}), std::invalid_argument);
}

TEST_CASE("config file values load and flags override them") {
  const std::string path = temp_path("config.cfg");
  spit(path,
       "# solver settings\n"
       "p=2.5\n"
       "nodes=48\n"
       "tol=1e-7\n");
  const RunConfig from_file = parse_config({"--config", path});
  CHECK(from_file.p == std::vector<double>{2.5});
  CHECK(from_file.nodes == 48);
  CHECK(from_file.tol == 1e-7);
  const RunConfig overridden = parse_config({"--config", path, "--nodes", "32"});
  CHECK(overridden.nodes == 32);
  CHECK(overridden.p == std::vector<double>{2.5});
  std::remove(path.c_str());
}

TEST_CASE("config files with unknown keys are rejected") {
  const std::string path = temp_path("bad.cfg");
  spit(path, "p=2.5\nmystery_knob=1\n");
  CHECK_THROWS_AS(parse_config({"--config", path}), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("solve mode emits a self-consistent JSON artifact") {
  const std::string path = temp_path("solve.json");
  RunConfig cfg = parse_config({"--p", "2.5", "--q", "2.0", "--nodes", "40", "--tol", "1e-8",
                                "--output", path});
  REQUIRE(run(cfg) == 0);
  const json j = json::parse(slurp(path));
  CHECK(j["lambda"].get<double>() > 0.0);
  CHECK(j["residual"].get<double>() <= 1e-8);
  CHECK(j["grid"]["nodes"].get<int>() == 40);
  CHECK(j["params"]["p"].get<double>() == 2.5);
  CHECK(j["params"]["p_star"].get<std::string>() == "inf");
  CHECK(j["eigenfunction"].size() == 40);
  const auto mu = j["mu_trace"].get<std::vector<double>>();
  REQUIRE(!mu.empty());
  const double slack = 1e-10 * mu.front();
  for (size_t n = 1; n < mu.size(); ++n) CHECK(mu[n] <= mu[n - 1] + slack);
  for (double nrm : j["lq_norm_trace"].get<std::vector<double>>()) {
    CHECK(std::abs(nrm - 1.0) <= 1e-12);
  }
  std::remove(path.c_str());
}

TEST_CASE("solve and oracle modes agree through the artifact layer") {
  const std::string solve_path = temp_path("agree_solve.json");
  const std::string oracle_path = temp_path("agree_oracle.json");
  REQUIRE(run(parse_config({"--nodes", "40", "--tol", "1e-10", "--output", solve_path})) == 0);
  REQUIRE(run(parse_config({"--mode", "oracle", "--nodes", "40", "--output", oracle_path})) == 0);
  const json solve = json::parse(slurp(solve_path));
  const json oracle = json::parse(slurp(oracle_path));
  CHECK(oracle["method"].get<std::string>() == "dense_p2");
  const double a = solve["lambda"].get<double>();
  const double b = oracle["lambda"].get<double>();
  CHECK(std::abs(a - b) <= 1e-8 * b);
  std::remove(solve_path.c_str());
  std::remove(oracle_path.c_str());
}

TEST_CASE("sweep mode covers the lattice and dominates the local-only runs") {
  const std::string mixed_path = temp_path("sweep_mixed.json");
  const std::string local_path = temp_path("sweep_local.json");
  const std::vector<std::string> base = {"--mode", "sweep",  "--p",   "1.5,2.0,2.5",
                                         "--nodes", "30",    "--tol", "1e-7"};
  auto with = [&](const std::string& path, bool local_only) {
    std::vector<std::string> args = base;
    args.push_back("--output");
    args.push_back(path);
    if (local_only) args.push_back("--local-only");
    return parse_config(args);
  };
  REQUIRE(run(with(mixed_path, false)) == 0);
  REQUIRE(run(with(local_path, true)) == 0);
  const json mixed = json::parse(slurp(mixed_path));
  const json local = json::parse(slurp(local_path));
  REQUIRE(mixed["rows"].size() == 3);
  REQUIRE(local["rows"].size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(mixed["rows"][i]["p"] == local["rows"][i]["p"]);
    CHECK(mixed["rows"][i]["lambda"].get<double>() > local["rows"][i]["lambda"].get<double>());
    CHECK(mixed["rows"][i]["residual"].get<double>() <= 1e-7);
  }
  std::remove(mixed_path.c_str());
  std::remove(local_path.c_str());
}

TEST_CASE("sweep CSV carries config comments and one row per tuple") {
  const std::string path = temp_path("sweep.csv");
  const RunConfig cfg = parse_config({"--mode", "sweep", "--p", "2.0", "--s", "0.3,0.7", "--nodes",
                                      "25", "--tol", "1e-7", "--format", "csv", "--output", path});
  REQUIRE(run(cfg) == 0);
  const std::string text = slurp(path);
  CHECK(text.find("# mode=sweep") != std::string::npos);
  CHECK(text.find("p,q,s,lambda,residual,outer_iterations\n") != std::string::npos);
  int data_rows = 0;
  std::istringstream lines(text);
  std::string line;
  bool past_header = false;
  while (std::getline(lines, line)) {
    if (line.rfind("p,q,s", 0) == 0) {
      past_header = true;
      continue;
    }
    if (past_header && !line.empty() && line[0] != '#') ++data_rows;
  }
  CHECK(data_rows == 2);
  std::remove(path.c_str());
}

TEST_CASE("certify mode passes and is byte-for-byte reproducible") {
  const std::string first = temp_path("certify_a.json");
  const std::string second = temp_path("certify_b.json");
  const RunConfig a = parse_config({"--mode", "certify", "--seed", "42", "--output", first});
  const RunConfig b = parse_config({"--mode", "certify", "--seed", "42", "--output", second});
  CHECK(run(a) == 0);
  CHECK(run(b) == 0);
  const std::string ta = slurp(first);
  // outputs only differ through the output path recorded in the config block
  std::string tb = slurp(second);
  size_t pos;
  while ((pos = tb.find("certify_b")) != std::string::npos) tb.replace(pos, 9, "certify_a");
  CHECK(ta == tb);
  const json j = json::parse(ta);
  CHECK(j["all_passed"].get<bool>());
  CHECK(j["checks"].size() >= 15);
  std::remove(first.c_str());
  std::remove(second.c_str());
}

TEST_CASE("runtime failures surface as an error artifact with nonzero status") {
  RunConfig cfg = parse_config({"--nodes", "10"});
  cfg.output_path = "/nonexistent_dir/out.json";
  CHECK(run(cfg) == 1);
}
