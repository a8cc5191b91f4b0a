#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bohrlat/cli.hpp"

using namespace bohrlat;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(BOHRLAT_DATA_DIR) + "/" + name; }

int count_of(const std::string& text, const std::string& needle) {
  int k = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++k;
  return k;
}

}  // namespace

TEST(CliPoset, JsonForThreePoints) {
  const auto r = run_cli({"poset", "--n", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["count"], 5);
  EXPECT_EQ(j["covers"].size(), 6u);
  EXPECT_EQ(j["atoms"].size(), 3u);
  EXPECT_EQ(j["F2"].size(), 4u);
}

TEST(CliPoset, DotHasOneEdgePerCover) {
  const auto r = run_cli({"poset", "--n", "3", "--dot"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_of(r.out, "->"), 6);
  EXPECT_EQ(count_of(r.out, ";\n") - count_of(r.out, "->") - 1, 5);  // node lines, minus rankdir
  EXPECT_EQ(count_of(run_cli({"poset", "--n", "1", "--dot"}).out, "->"), 0);
}

TEST(CliPoset, CoversMatchBruteForce) {
  for (int n = 1; n <= 5; ++n) {
    const Json j = Json::parse(run_cli({"poset", "--n", std::to_string(n)}).out);
    const auto ps = enumerate_partitions(n);
    std::size_t expected = 0;
    for (const auto& a : ps) {
      for (const auto& b : ps) {
        if (a == b || !refines(a, b)) continue;
        bool between = false;
        for (const auto& c : ps) {
          between = between || (c != a && c != b && refines(a, c) && refines(c, b));
        }
        if (!between) ++expected;
      }
    }
    EXPECT_EQ(j["covers"].size(), expected) << "n = " << n;
  }
}

TEST(CliPoset, LimitsAndMalformedInput) {
  EXPECT_EQ(run_cli({"poset", "--n", "9"}).code, 3);
  EXPECT_EQ(run_cli({"poset", "--n", "7", "--dot"}).code, 3);
  EXPECT_EQ(run_cli({"poset", "--n", "x"}).code, 2);
  EXPECT_EQ(run_cli({"poset", "--n", "0"}).code, 2);
  EXPECT_EQ(run_cli({"poset"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(CliReconstruct, RandomPermutationTable) {
  const auto r = run_cli({"reconstruct", "--n", "4", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["certificate"]["pass"].get<bool>());
  EXPECT_EQ(j["phi"].size(), 4u);
}

TEST(CliReconstruct, TableFiles) {
  const auto id = run_cli({"reconstruct", "--input", data("table_identity_n3.json")});
  ASSERT_EQ(id.code, 0) << id.err;
  EXPECT_EQ(Json::parse(id.out)["phi"], Json::parse("[0, 1, 2]"));
  const auto cyc = run_cli({"reconstruct", "--input", data("table_cycle_n4.json")});
  ASSERT_EQ(cyc.code, 0) << cyc.err;
  EXPECT_EQ(Json::parse(cyc.out)["phi"], Json::parse("[1, 2, 3, 0]"));
  EXPECT_EQ(run_cli({"reconstruct", "--input", data("table_swap_n2.json")}).code, 5);
  EXPECT_EQ(run_cli({"reconstruct", "--input", data("table_not_iso_n3.json")}).code, 4);
}

TEST(CliReconstruct, OracleFile) {
  const auto r = run_cli({"reconstruct", "--input", data("oracle_m3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(Json::parse(r.out).contains("generator"));
  EXPECT_EQ(run_cli({"reconstruct", "--input", data("oracle_m2.json")}).code, 5);
}

TEST(CliReconstruct, ExceptionalShapes) {
  const auto m2 = run_cli({"reconstruct", "--shape", "2"});
  EXPECT_EQ(m2.code, 5);
  EXPECT_NE(m2.err.find("M_2"), std::string::npos);
  EXPECT_NE(m2.err.find("candidates"), std::string::npos);
  EXPECT_EQ(run_cli({"reconstruct", "--shape", "1,1"}).code, 5);
}

TEST(CliReconstruct, SyntheticShapes) {
  for (const std::string seed : {"1", "2"}) {
    const auto r = run_cli({"reconstruct", "--shape", "3", "--seed", seed});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(Json::parse(r.out)["certificate"]["pass"].get<bool>());
  }
  EXPECT_EQ(run_cli({"reconstruct", "--shape", "2,1"}).code, 0);
  EXPECT_EQ(run_cli({"reconstruct", "--shape", "4,3"}).code, 3);
}

TEST(CliReconstruct, MalformedInputs) {
  EXPECT_EQ(run_cli({"reconstruct"}).code, 2);
  EXPECT_EQ(run_cli({"reconstruct", "--shape", "2,x"}).code, 2);
  EXPECT_EQ(run_cli({"reconstruct", "--input", data("no_such_file.json")}).code, 2);
  const auto tmp = std::filesystem::temp_directory_path() / "bohrlat_bad.json";
  std::ofstream(tmp) << "{\"n\": 3, \"map\": [{\"from\": [0, 0]}]}";
  EXPECT_EQ(run_cli({"reconstruct", "--input", tmp.string()}).code, 2);
  std::ofstream(tmp) << "{not json";
  EXPECT_EQ(run_cli({"reconstruct", "--input", tmp.string()}).code, 2);
  std::filesystem::remove(tmp);
}

TEST(CliVerify, SuitesAreDeterministic) {
  const auto a = run_cli({"verify", "--seed", "7"});
  const auto b = run_cli({"verify", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Json j = Json::parse(a.out);
  std::set<std::string> suites;
  for (const auto& s : j["sections"]) suites.insert(s["suite"].get<std::string>());
  EXPECT_EQ(suites, (std::set<std::string>{"partitions", "symmetry", "omp", "reconstruct"}));
}

TEST(CliVerify, SingleSuiteAndFailures) {
  const auto p = run_cli({"verify", "--suite", "partitions"});
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(Json::parse(p.out)["suite"], "partitions");
  const auto tight = run_cli({"verify", "--suite", "symmetry", "--tol", "1e-30"});
  EXPECT_EQ(tight.code, 1);
  EXPECT_NE(tight.err.find("FAIL symmetry/"), std::string::npos);
  EXPECT_EQ(run_cli({"verify", "--suite", "nope"}).code, 2);
}

TEST(CliVerify, EnvironmentTolerance) {
  setenv("BOHRLAT_TOL", "abc", 1);
  EXPECT_EQ(run_cli({"verify", "--suite", "partitions"}).code, 2);
  setenv("BOHRLAT_TOL", "1e-30", 1);
  EXPECT_EQ(run_cli({"verify", "--suite", "symmetry"}).code, 1);
  EXPECT_EQ(run_cli({"verify", "--suite", "symmetry", "--tol", "1e-9"}).code, 0);
  unsetenv("BOHRLAT_TOL");
}

TEST(CliVerify, OutputFile) {
  const auto tmp = std::filesystem::temp_directory_path() / "bohrlat_report.json";
  const auto r = run_cli({"verify", "--suite", "omp", "--out", tmp.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(tmp);
  EXPECT_TRUE(Json::parse(f)["pass"].get<bool>());
  std::filesystem::remove(tmp);
}
