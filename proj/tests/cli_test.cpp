#include <cmath>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli_support.hpp"

namespace uxcharge {
namespace {

using nlohmann::json;
using testing::golden;
using testing::read_file;
using testing::run_cli;
using testing::TempDir;
using testing::write_file;

constexpr const char* kTwoCpmAds = R"({
  "format_version": 1,
  "events": [{"id": "view", "kind": "view", "prob": 1.0}, {"id": "click", "kind": "click", "prob": 0.1}],
  "offers": [
    {"ad_id": "A", "price_type": "cpm", "bids": {"view": 0.5}},
    {"ad_id": "B", "price_type": "cpm", "bids": {"view": 0.3}}
  ]
})";

json parse_stdout(const testing::RunResult& r) { return json::parse(r.out); }

TEST(CliGolden, SimulateReportsAreByteIdentical) {
  for (const char* name : testing::kGoldenScenarios) {
    const auto r = run_cli({"simulate", golden(std::string(name) + ".json").string()});
    ASSERT_EQ(r.exit_code, 0) << name << ": " << r.err;
    EXPECT_EQ(r.out, read_file(golden(std::string(name) + ".expected.json"))) << name;
  }
}

TEST(CliGolden, ThreadCountDoesNotChangeReport) {
  const std::string input = golden("hybrid.json").string();
  const auto one = run_cli({"simulate", input, "--threads", "1"});
  const auto four = run_cli({"simulate", input, "--threads", "4"});
  ASSERT_EQ(one.exit_code, 0);
  EXPECT_EQ(one.out, four.out);
}

TEST(CliSimulate, SameSeedSameBytes) {
  const std::string input = golden("cpc_view.json").string();
  const auto first = run_cli({"simulate", input, "--seed", "99", "--trials", "5000"});
  const auto second = run_cli({"simulate", input, "--seed", "99", "--trials", "5000"});
  ASSERT_EQ(first.exit_code, 0);
  EXPECT_EQ(first.out, second.out);
  const auto other = run_cli({"simulate", input, "--seed", "100", "--trials", "5000"});
  EXPECT_NE(first.out, other.out);
}

TEST(CliSimulate, ZeroTrialsIsValidationError) {
  const auto r = run_cli({"simulate", golden("cpc_view.json").string(), "--trials", "0"});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("trials must be >= 1"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(CliSimulate, MillionTrialsMatchClosedForm) {
  const auto r = run_cli({"simulate", golden("cpc_view.json").string(), "--trials", "1000000", "--seed", "42"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto outcome = parse_stdout(r)["ads"][0]["outcome"];
  const double expected = outcome["expected_payment"].get<double>();
  const double mean = outcome["monte_carlo"]["mean"].get<double>();
  const double se = outcome["monte_carlo"]["stderr"].get<double>();
  EXPECT_NEAR(expected, 0.15, 1e-12);
  EXPECT_LE(std::abs(mean - expected), 3.0 * se);
}

TEST(CliSimulate, WritesCsvAndOutputFile) {
  TempDir dir;
  const auto csv = dir / "summary.csv";
  const auto out = dir / "report.json";
  const auto r = run_cli({"simulate", golden("cpm_both.json").string(), "--csv", csv.string(), "-o", out.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(read_file(out), read_file(golden("cpm_both.expected.json")));
  const std::string table = read_file(csv);
  EXPECT_EQ(table.rfind("ad_id,expected_adjusted_value,slot,expected_payment,mc_mean,mc_stderr\n", 0), 0U);
  EXPECT_NE(table.find("\ncpm-ad,0.80000000000000004,1,0.80000000000000004,"), std::string::npos);
}

TEST(CliSimulate, RejectsAdjustedOffersInput) {
  TempDir dir;
  const auto adjusted = dir / "adjusted.json";
  ASSERT_EQ(run_cli({"adjust", golden("cpc_view.json").string(), "-o", adjusted.string()}).exit_code, 0);
  EXPECT_EQ(run_cli({"simulate", adjusted.string()}).exit_code, 1);
}

TEST(CliAdjust, CpcViewExample) {
  const auto r = run_cli({"adjust", golden("cpc_view.json").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = parse_stdout(r);
  EXPECT_EQ(doc["command"], "adjust");
  const auto& ad = doc["ads"][0];
  EXPECT_EQ(ad["ad_id"], "cpc-ad");
  EXPECT_NEAR(ad["expected_adjusted_value"].get<double>(), 0.15, 1e-12);
  EXPECT_NEAR(ad["adjusted"]["click"].get<double>(), 1.5, 1e-12);
  EXPECT_TRUE(doc["excluded"].empty());
}

TEST(CliAdjust, InfeasibleAdIsListedNotFatal) {
  const auto r = run_cli({"adjust", golden("cpm_both.json").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = parse_stdout(r);
  ASSERT_EQ(doc["excluded"].size(), 1U);
  EXPECT_EQ(doc["excluded"][0]["ad_id"], "harmful");
  EXPECT_EQ(doc["ads"].size(), 2U);
}

TEST(CliAdjust, StrategyOverride) {
  const auto r = run_cli({"adjust", golden("cpc_view.json").string(), "--strategy", "identity"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = parse_stdout(r);
  EXPECT_EQ(doc["strategy"], "identity");
  EXPECT_NEAR(doc["ads"][0]["adjusted"]["view"].get<double>(), -0.05, 1e-12);
  EXPECT_NEAR(doc["ads"][0]["expected_adjusted_value"].get<double>(), 0.15, 1e-12);
  EXPECT_EQ(run_cli({"adjust", golden("cpc_view.json").string(), "--strategy", "single:nope"}).exit_code, 1);
}

TEST(CliAuction, SecondPriceChargesRunnerUp) {
  TempDir dir;
  write_file(dir / "two.json", kTwoCpmAds);
  const auto r = run_cli({"auction", (dir / "two.json").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = parse_stdout(r);
  const auto& winners = doc["auction"]["winners"];
  ASSERT_EQ(winners.size(), 1U);
  EXPECT_EQ(winners[0]["ad_id"], "A");
  EXPECT_NEAR(winners[0]["prices"]["view"].get<double>(), 0.3, 1e-12);
}

TEST(CliAuction, FirstPriceChargesBid) {
  TempDir dir;
  write_file(dir / "two.json", kTwoCpmAds);
  const auto r = run_cli({"auction", (dir / "two.json").string(), "--pricing", "first"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NEAR(parse_stdout(r)["auction"]["winners"][0]["prices"]["view"].get<double>(), 0.5, 1e-12);
}

TEST(CliAuction, MoreSlotsThanAds) {
  const auto r = run_cli({"auction", golden("cpc_view.json").string(), "--slots", "3"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = parse_stdout(r);
  const auto& winners = doc["auction"]["winners"];
  ASSERT_EQ(winners.size(), 2U);
  EXPECT_EQ(winners[1]["ad_id"], "rival");
  EXPECT_EQ(winners[1]["prices"]["view"].get<double>(), 0.0);
}

TEST(CliAuction, AcceptsAdjustOutput) {
  TempDir dir;
  const auto adjusted = dir / "adjusted.json";
  ASSERT_EQ(run_cli({"adjust", golden("cpc_view.json").string(), "-o", adjusted.string()}).exit_code, 0);
  const auto r = run_cli({"auction", adjusted.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto doc = parse_stdout(r);
  const auto& winner = doc["auction"]["winners"][0];
  EXPECT_EQ(winner["ad_id"], "cpc-ad");
  EXPECT_NEAR(winner["prices"]["click"].get<double>(), 1.0, 1e-12);
}

TEST(CliAuction, EmptyOffersProduceNoAuction) {
  TempDir dir;
  write_file(dir / "empty.json", R"({"format_version": 1, "offers": []})");
  const auto r = run_cli({"auction", (dir / "empty.json").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(parse_stdout(r)["auction"].is_null());
}

TEST(CliErrors, MissingFileIsIoError) {
  const auto r = run_cli({"simulate", "/nonexistent/scenario.json"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.err)["error"], "io");
}

TEST(CliErrors, MalformedJsonIsValidationError) {
  TempDir dir;
  write_file(dir / "bad.json", "{ \"format_version\": 1, ");
  const auto r = run_cli({"adjust", (dir / "bad.json").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.err)["error"], "validation");
}

TEST(CliErrors, InvalidScenarioListsViolations) {
  TempDir dir;
  write_file(dir / "bad.json", R"({
    "format_version": 1,
    "events": [{"id": "view", "kind": "view", "prob": 0.5}],
    "offers": [{"ad_id": "A", "price_type": "cpm", "bids": {"view": -1.0}}]
  })");
  const auto r = run_cli({"simulate", (dir / "bad.json").string()});
  EXPECT_EQ(r.exit_code, 1);
  const auto diag = json::parse(r.err);
  EXPECT_GE(diag["violations"].size(), 2U);
}

TEST(CliErrors, UsageErrors) {
  EXPECT_EQ(run_cli({}).exit_code, 1);
  EXPECT_EQ(run_cli({"bogus"}).exit_code, 1);
  EXPECT_EQ(run_cli({"simulate"}).exit_code, 1);
  EXPECT_EQ(run_cli({"simulate", golden("cpc_view.json").string(), "--pricing", "third"}).exit_code, 1);
}

TEST(CliHelp, ExitsZero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

}  // namespace
}  // namespace uxcharge
