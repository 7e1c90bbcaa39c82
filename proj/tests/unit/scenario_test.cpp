#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "blq/error.hpp"
#include "blq/scenario.hpp"

namespace blq {
namespace {

const std::string kDir = BLQ_TEST_SCENARIOS;

TEST(Scenario, MalformedJsonIsASchemaError) {
  EXPECT_THROW(parse_scenario("{\"name\": \"x\", "), SchemaError);
  EXPECT_THROW(load_scenario_file(kDir + "/examples/malformed.json"), SchemaError);
}

TEST(Scenario, ValidationNamesTheProblem) {
  EXPECT_THROW(parse_scenario(R"({"task": "gowers", "seed": 1, "checks": []})"), SchemaError);
  EXPECT_THROW(parse_scenario(R"({"name": "a", "task": "nope"})"), SchemaError);
  try {
    parse_scenario(R"({"name": "a", "task": "gowers", "checks": []})");
    FAIL() << "missing seed accepted";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
  }
}

TEST(Scenario, YoungExampleReportsSqrtThreeOverTwo) {
  RunReport r = run_scenario(load_scenario_file(kDir + "/examples/young_gaussian_bl.json"));
  ASSERT_TRUE(r.pass()) << r.error;
  EXPECT_NEAR(r.results["cases"][0]["value"].get<double>(), 0.866025, 1e-6);
}

TEST(Scenario, DiscreteExamplePasses) {
  RunReport r = run_scenario(load_scenario_file(kDir + "/examples/discrete_z2xz2.json"));
  EXPECT_TRUE(r.pass()) << r.error;
  EXPECT_TRUE(r.results["cases"][0]["exact_match"].get<bool>());
}

TEST(Scenario, EngineErrorsAreRecordedNotThrown) {
  Json s = parse_scenario(R"({"name": "bad", "task": "gaussian-bl",
                              "cases": [{"datum": {"maps": [[[1, 1], [2, 2]]], "c": [1]}}]})");
  RunReport r = run_scenario(s);
  EXPECT_FALSE(r.pass());
  EXPECT_NE(r.error.find("surjective"), std::string::npos);
}

TEST(Scenario, ToleranceOverrideReplacesTheBound) {
  Json s = load_scenario_file(kDir + "/examples/young_gaussian_bl.json");
  RunOverrides o;
  o.tol = 0.5;
  RunReport r = run_scenario(s, o);
  ASSERT_FALSE(r.assertions.empty());
  EXPECT_EQ(r.assertions[0].bound, 0.5);
  EXPECT_EQ(r.inputs["tol_override"].get<double>(), 0.5);
}

TEST(Scenario, SeedOverrideChangesStochasticResults) {
  Json s = parse_scenario(R"({"name": "g", "task": "gowers", "seed": 1,
                              "checks": [{"kind": "logconvexity", "d": 2, "n": 16, "functions": 5}]})");
  RunOverrides o;
  o.seed = 2;
  Json a = report_to_json(run_scenario(s)), b = report_to_json(run_scenario(s, o));
  EXPECT_NE(a["results"], b["results"]);
}

TEST(Scenario, ResolvesShippedNames) {
  setenv("BLQ_SCENARIO_DIR", kDir.c_str(), 1);
  EXPECT_EQ(std::filesystem::path(resolve_scenario("ac01_gaussian_constants")).filename(), "ac01_gaussian_constants.json");
  EXPECT_EQ(std::filesystem::path(resolve_scenario("young_gaussian_bl")).filename(), "young_gaussian_bl.json");
  EXPECT_THROW(resolve_scenario("does_not_exist"), SchemaError);
}

TEST(Report, CanonicalJsonIsSortedAndStable) {
  Json j = {{"b", 1.0 / 3.0}, {"a", {{"z", std::numeric_limits<double>::infinity()}, {"y", 2}}}};
  std::string s = canonical_json(j);
  EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
  EXPECT_NE(s.find("0.333333333333"), std::string::npos);
  EXPECT_NE(s.find("\"inf\""), std::string::npos);
  Json copy = Json::parse(R"({"a": {"y": 2}, "b": 0})");
  copy["b"] = 1.0 / 3.0;
  copy["a"]["z"] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(s, canonical_json(copy));
}

TEST(Report, RepeatedRunsAreByteIdentical) {
  Json s = load_scenario_file(kDir + "/examples/discrete_z2xz2.json");
  EXPECT_EQ(canonical_json(report_to_json(run_scenario(s))), canonical_json(report_to_json(run_scenario(s))));
}

TEST(Report, WritesJsonCsvAndTables) {
  Json s = parse_scenario(R"({"name": "prof", "task": "gowers", "seed": 3,
                              "checks": [{"kind": "profile", "n": 8, "max_order": 3, "table": "profile"}]})");
  RunReport r = run_scenario(s);
  auto dir = std::filesystem::temp_directory_path() / "blq_report_test";
  std::filesystem::remove_all(dir);
  write_report(r, dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "prof.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "prof.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "prof.profile.csv"));
  std::ifstream in(dir / "prof.json");
  Json back = Json::parse(in);
  EXPECT_EQ(back["library_version"], kLibraryVersion);
  EXPECT_TRUE(back["pass"].get<bool>());
}

}  // namespace
}  // namespace blq
