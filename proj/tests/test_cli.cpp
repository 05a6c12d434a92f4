#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gl2rep/cli_app.hpp"

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = gl2rep::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("exit code contract") {
  SECTION("all checks pass -> 0") {
    CHECK(run_cli({"verify", "cosets", "--p", "5", "--n", "1..4"}).code == 0);
  }
  SECTION("usage errors -> 2") {
    CHECK(run_cli({"verify", "cosets", "--p", "4", "--n", "1"}).code == 2);
    CHECK(run_cli({"dims", "--family", "nope", "--p", "5", "--n", "1"}).code == 2);
    CHECK(run_cli({"dims", "--family", "ind", "--p", "5", "--n", "zz"}).code == 2);
    CHECK(run_cli({"nonsense"}).code == 2);
    CHECK(run_cli({}).code == 2);
  }
  SECTION("feasibility cap -> 2 with a cost estimate") {
    auto res = run_cli({"invariants", "--p", "5", "--r", "4", "--lambda", "1", "--subgroup", "Kn",
                        "--n", "4"});
    CHECK(res.code == 2);
    CHECK(res.err.find("exceeds cap") != std::string::npos);
  }
  SECTION("help -> 0") {
    auto res = run_cli({"--help"});
    CHECK(res.code == 0);
    CHECK(res.out.find("invariants") != std::string::npos);
  }
}

TEST_CASE("CSV golden bytes") {
  auto res = run_cli({"dims", "--family", "barr", "--p", "5", "--r", "1", "--lambda", "0", "--n",
                      "0..2", "--format", "csv"});
  REQUIRE(res.code == 0);
  CHECK(res.out ==
        "p,r,lambda,a,family,n,dim\n"
        "5,1,0,0,barr,0,2\n"
        "5,1,0,0,barr,1,10\n"
        "5,1,0,0,barr,2,50\n");

  auto ind = run_cli({"dims", "--family", "ind", "--p", "5", "--r", "2", "--n", "1..2",
                      "--format", "csv"});
  REQUIRE(ind.code == 0);
  CHECK(ind.out ==
        "p,r,lambda,a,family,n,dim\n"
        "5,2,0,0,ind,1,18\n"
        "5,2,0,0,ind,2,90\n");
}

TEST_CASE("JSON report schema") {
  auto res = run_cli({"verify", "cosets", "--p", "7", "--n", "1..3"});
  REQUIRE(res.code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j["command"] == "verify cosets");
  REQUIRE(j.contains("params"));
  REQUIRE(j.contains("rows"));
  REQUIRE(j.contains("checks"));
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][0]["n"] == 1);
  CHECK(j["rows"][0]["dim"] == 8);  // (2*1-1)*6+2
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("expected"));
    CHECK(c.contains("actual"));
    CHECK(c["pass"] == true);
  }
}

TEST_CASE("byte-identical output for identical run configs") {
  std::vector<std::string> args{"invariants", "--p", "5", "--r", "1", "--lambda", "1",
                                "--subgroup", "Kn", "--n", "1", "--seed", "42"};
  auto a = run_cli(args);
  auto b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  std::vector<std::string> threaded = args;
  threaded.push_back("--threads");
  threaded.push_back("2");
  auto c = run_cli(threaded);
  CHECK(a.out == c.out);
}

TEST_CASE("config file provides defaults, flags win") {
  const std::string path = "test_cli_config.tmp";
  {
    std::ofstream f(path);
    f << "# comment\np=5\nr=1\nlambda=1\nsubgroup=Kn\nn=1\n";
  }
  auto from_config = run_cli({"invariants", "--config", path, "--format", "csv"});
  REQUIRE(from_config.code == 0);
  CHECK(from_config.out.find("5,1,1,0,Kn,1,6") != std::string::npos);

  auto overridden = run_cli({"invariants", "--config", path, "--r", "2", "--format", "csv"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out.find("5,2,1,0,Kn,1,6") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("--out writes the report to a file") {
  const std::string path = "test_cli_out.tmp";
  auto res = run_cli({"verify", "cosets", "--p", "5", "--n", "1", "--out", path, "--format", "csv"});
  REQUIRE(res.code == 0);
  CHECK(res.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == "p,r,lambda,a,family,n,dim\n5,,,,cosets,1,6\n");
  std::remove(path.c_str());
}

TEST_CASE("invariants emits a stability column") {
  auto res = run_cli({"invariants", "--p", "5", "--r", "2", "--lambda", "1", "--subgroup", "T1",
                      "--n", "1", "--format", "csv"});
  REQUIRE(res.code == 0);
  CHECK(res.out.find("stable") != std::string::npos);
  CHECK(res.out.find(",yes") != std::string::npos);

  auto fast = run_cli({"invariants", "--p", "5", "--r", "2", "--lambda", "1", "--subgroup", "T1",
                       "--n", "1", "--no-stability", "--format", "csv"});
  REQUIRE(fast.code == 0);
  CHECK(fast.out.find("stable") == std::string::npos);
}

TEST_CASE("twist check through the CLI") {
  auto res = run_cli({"invariants", "--p", "5", "--r", "1", "--lambda", "0", "--subgroup", "K1",
                      "--n", "1", "--twist-check", "--no-stability", "--format", "json"});
  REQUIRE(res.code == 0);
  CHECK(res.out.find("twist_symmetry_r1_vs_r3") != std::string::npos);
}

TEST_CASE("growth reports carry exponents") {
  auto res = run_cli({"growth", "--family", "ps-kn", "--p", "5", "--r", "1", "--lambda", "1",
                      "--n", "1..3", "--format", "json"});
  REQUIRE(res.code == 0);
  auto j = nlohmann::json::parse(res.out);
  REQUIRE(j.contains("exponents"));
  CHECK(j["exponents"].size() == 2);
  CHECK(j["exponents"][0]["exact"] == true);
  CHECK(j["exponents"][0]["value"] == 1.0);
  CHECK(j["rows"][0]["dim"] == 6);
  CHECK(j["rows"][1]["dim"] == 30);
  CHECK(j["rows"][2]["dim"] == 150);
}

TEST_CASE("hecke, filtration, zp, and product subcommands") {
  SECTION("hecke checks pass, including the r=0 adjacency weight") {
    auto res = run_cli({"hecke", "--p", "5", "--r", "0", "--m", "2", "--format", "json"});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("adjacency_column_weight") != std::string::npos);
    CHECK(run_cli({"hecke", "--p", "5", "--r", "1", "--m", "3"}).code == 0);
  }
  SECTION("filtration by explicit d and by random trials") {
    auto res = run_cli({"filtration", "--p", "5", "--d", "7", "--n", "3", "--format", "csv"});
    REQUIRE(res.code == 0);
    CHECK(res.out ==
          "p,r,lambda,a,family,n,dim\n"
          "5,,,,filtration,1,5\n"
          "5,,,,filtration,2,1\n"
          "5,,,,filtration,3,1\n");
    CHECK(run_cli({"filtration", "--p", "5", "--count", "20", "--n", "4"}).code == 0);
    CHECK(run_cli({"filtration", "--p", "5", "--d", "30", "--n", "3"}).code == 2);  // d > p^(n-1)
  }
  SECTION("zp") {
    auto res = run_cli({"zp", "--p", "5", "--count", "25", "--format", "json"});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("\"actual\": \"25/25\"") != std::string::npos);
  }
  SECTION("product multiplicativity through the CLI") {
    auto res = run_cli({"product", "--p", "5", "--r", "1,1", "--lambda", "1,0", "--subgroup",
                        "K1,T1", "--n", "1,1", "--format", "json"});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("kron_equals_product") != std::string::npos);
    CHECK(run_cli({"product", "--p", "5", "--r", "1", "--lambda", "1", "--subgroup", "K1", "--n",
                   "1"})
              .code == 2);  // needs two factors
  }
}

TEST_CASE("a failing check yields exit code 1") {
  gl2rep::Report rep;
  rep.command = "synthetic";
  rep.add_check("deliberate_mismatch", "1", "2");
  std::ostringstream out, err;
  CHECK(gl2rep::cli::emit(rep, {}, out, err) == 1);
  CHECK(err.str().find("deliberate_mismatch") != std::string::npos);
}

TEST_CASE("GL2REP_THREADS drives the worker count without changing bytes") {
  std::vector<std::string> args{"invariants", "--p", "5", "--r", "1", "--lambda", "1",
                                "--subgroup", "Kn", "--n", "1..2", "--seed", "5"};
  auto base = run_cli(args);
  REQUIRE(base.code == 0);
  setenv("GL2REP_THREADS", "2", 1);
  auto threaded = run_cli(args);
  unsetenv("GL2REP_THREADS");
  CHECK(base.out == threaded.out);
}
