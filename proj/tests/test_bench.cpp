#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "agco/bench.hpp"

using namespace agco;
using namespace agco::bench;

namespace {

ExperimentSpec small(Family f, std::size_t seeds) {
  auto s = default_spec(f, seeds);
  return s;
}

}  // namespace

TEST(Bench, RawHeaderIsStable) {
  std::ostringstream out;
  write_raw_csv(out, {});
  EXPECT_EQ(out.str(),
            "family,param,value,seed,algorithm,scenario_hash,tasks_completed,total_distance,total_time,objective,"
            "pareto_flag,runtime_ms,error\n");
}

TEST(Bench, DefaultGrids) {
  EXPECT_EQ(default_spec(Family::VaryTasks).grid, (std::vector<double>{10, 15, 20, 25, 30}));
  EXPECT_EQ(default_spec(Family::VaryAgents).grid.size(), 9u);
  EXPECT_EQ(default_spec(Family::VaryQ).grid, (std::vector<double>{2, 3, 4, 5}));
  EXPECT_EQ(default_spec(Family::Charging).grid.size(), 5u);
  EXPECT_EQ(default_spec(Family::VaryTasks).seeds.size(), 20u);
  EXPECT_THROW(family_from_string("vary_everything"), ValidationError);
}

TEST(Bench, VaryTasksRowCount) {
  const auto res = run_experiment(small(Family::VaryTasks, 20));
  EXPECT_EQ(res.rows.size(), 200u);
  EXPECT_EQ(res.failures, 0u);
  for (std::size_t i = 0; i + 1 < res.rows.size(); i += 2) {
    EXPECT_EQ(res.rows[i].algorithm, "mt-mcmf");
    EXPECT_EQ(res.rows[i + 1].algorithm, "mt-grdpt");
    EXPECT_EQ(res.rows[i].scenario_hash, res.rows[i + 1].scenario_hash);
  }
  const auto agg = aggregate(res.rows);
  EXPECT_EQ(agg.size(), 10u);
  EXPECT_EQ(agg[0].runs, 20u);
}

TEST(Bench, RowsAreDeterministicApartFromRuntime) {
  const auto spec = small(Family::VaryDistribution, 3);
  const auto a = run_experiment(spec), b = run_experiment(spec);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(raw_cells(a.rows[i], false), raw_cells(b.rows[i], false));
}

TEST(Bench, WeightSweepFlagsParetoOnIlpRows) {
  const auto res = run_experiment(small(Family::WeightSweep, 2));
  EXPECT_EQ(res.rows.size(), 2u * 5u * 2u);
  EXPECT_EQ(res.failures, 0u);
  for (const auto& r : res.rows) {
    if (r.algorithm == "w-ilp")
      EXPECT_GE(r.pareto_flag, 0);
    else
      EXPECT_EQ(r.pareto_flag, -1);
    EXPECT_GE(r.objective, -1e-12);
  }
}

TEST(Bench, ChargingRows) {
  auto spec = small(Family::Charging, 2);
  spec.grid = {1, 3};
  const auto res = run_experiment(spec);
  EXPECT_EQ(res.rows.size(), 2u * 2u * 2u);
  for (const auto& r : res.rows) EXPECT_TRUE(r.error.empty()) << r.error;
}

TEST(Bench, SpecFromJson) {
  const auto j = json::parse(R"({"family": "vary_q", "grid": [2, 3], "seeds": [5, 6],
                                 "base": {"num_tasks": 12, "distribution": "compact"}})");
  const auto s = spec_from_json(j);
  EXPECT_EQ(s.family, Family::VaryQ);
  EXPECT_EQ(s.grid, (std::vector<double>{2, 3}));
  EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{5, 6}));
  EXPECT_EQ(s.base.num_tasks, 12u);
  EXPECT_EQ(s.base.distribution, Distribution::Compact);
  EXPECT_FALSE(s.default_grid);
  EXPECT_THROW(spec_from_json(json::parse(R"({"family": "vary_q", "bogus": 1})")), ValidationError);
  EXPECT_THROW(spec_from_json(json::parse(R"({"family": "vary_q", "algorithms": ["w-ilp"]})")), ValidationError);
}

TEST(Bench, JsonCarriesMetadata) {
  auto spec = small(Family::VaryAgents, 1);
  spec.grid = {3};
  const auto res = run_experiment(spec);
  const auto j = to_json(spec, res);
  EXPECT_EQ(j["metadata"]["grid_source"], "default configuration grid");
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["aggregate"].size(), 2u);
}
