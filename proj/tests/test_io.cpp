#include <gtest/gtest.h>

#include <sstream>

#include "agco/io.hpp"
#include "agco/scenario.hpp"

using namespace agco;
using agco::io::json;

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(3.0), "3");
  EXPECT_EQ(std::stod(io::format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(RoundTrip, FamtScenario) {
  GenConfig c;
  c.seed = 21;
  auto s = gen_famt(c);
  s.agents[0].max_travel = std::numeric_limits<double>::infinity();
  const json j = io::to_json(s);
  EXPECT_EQ(j["type"], "famt_scenario");
  EXPECT_EQ(j["schema_version"], io::kSchemaVersion);
  EXPECT_TRUE(j["agents"][0]["max_travel"].is_null());
  const auto back = io::famt_scenario_from_json(json::parse(j.dump()));
  EXPECT_EQ(back, s);
  EXPECT_EQ(io::scenario_hash(back), io::scenario_hash(s));
}

TEST(RoundTrip, MaftInstance) {
  GenConfig c;
  c.seed = 2;
  const auto inst = gen_maft(c);
  const json j = io::to_json(inst);
  const auto back = io::maft_instance_from_json(json::parse(j.dump()));
  EXPECT_TRUE(back == inst);
  EXPECT_EQ(back.routes().size(), inst.routes().size());
}

TEST(RoundTrip, ChargingScenario) {
  ChargingGenConfig c;
  c.seed = 8;
  const auto s = gen_charging(c);
  EXPECT_EQ(io::charging_scenario_from_json(json::parse(io::to_json(s).dump())), s);
}

TEST(Hash, DistinguishesScenarios) {
  GenConfig a, b;
  a.seed = 1;
  b.seed = 2;
  EXPECT_NE(io::scenario_hash(gen_famt(a)), io::scenario_hash(gen_famt(b)));
  EXPECT_EQ(io::scenario_hash(gen_famt(a)).size(), 16u);
}

TEST(Schema, RejectsWrongTypeOrVersion) {
  GenConfig c;
  json j = io::to_json(gen_famt(c));
  json wrong = j;
  wrong["type"] = "maft_scenario";
  EXPECT_THROW(io::famt_scenario_from_json(wrong), io::FormatError);
  wrong = j;
  wrong["schema_version"] = 99;
  EXPECT_THROW(io::famt_scenario_from_json(wrong), io::FormatError);
  wrong = j;
  wrong["agents"][0].erase("speed");
  EXPECT_THROW(io::famt_scenario_from_json(wrong), io::FormatError);
}

TEST(Schema, AssignmentDocumentIsWellFormed) {
  GenConfig c;
  c.seed = 4;
  const auto s = gen_famt(c);
  const auto a = solve_mt_mcmf(s);
  const json j = io::to_json(a, s);
  EXPECT_TRUE(io::check_famt_assignment_json(j).empty());
  json broken = j;
  broken.erase("tasks_completed");
  broken["plans"][0]["tasks"][0] = 3;
  EXPECT_EQ(io::check_famt_assignment_json(broken).size(), 2u);
}

TEST(Csv, QuotesWhenNeeded) {
  EXPECT_EQ(io::csv_cell("plain"), "plain");
  EXPECT_EQ(io::csv_cell("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_cell("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::ostringstream out;
  io::write_csv_row(out, {"x", "y,z"});
  EXPECT_EQ(out.str(), "x,\"y,z\"\n");
}

TEST(Csv, FamtSummary) {
  GenConfig c;
  const auto s = gen_famt(c);
  const auto a = solve_mt_mcmf(s);
  const auto row = io::famt_summary_row("s0", s, a, 1.5);
  ASSERT_EQ(row.size(), io::famt_summary_header().size());
  EXPECT_EQ(row[2], "4");
  EXPECT_EQ(row[3], "20");
  EXPECT_EQ(row[4], "3");
  EXPECT_EQ(row[5], "6");
}

TEST(Csv, SweepLeavesFailedCellsEmpty) {
  std::vector<ParetoPoint> pts{{0.0, 1.0, 2.0, 3.0, 0.0, true, {}}, {1.0, 0.0, 0.0, 0.0, 0.0, false, "infeasible"}};
  std::ostringstream out;
  io::write_sweep_csv(out, pts);
  EXPECT_EQ(out.str(), "k_t,k_d,time,distance,pareto_flag\n0,1,2,3,1\n1,0,,,0\n");
}
