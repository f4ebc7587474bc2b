#include <gtest/gtest.h>

#include <random>

#include "agco/maft.hpp"
#include "oracles.hpp"

using namespace agco;

namespace {

Region region(std::string id, Position p, std::size_t uavs, std::size_t ugvs, CapabilityVector caps = {5, 5}) {
  return {std::move(id), p, uavs, ugvs, 20.0, 5.0, caps, caps};
}

Task task(std::string id, Position p, std::size_t demand, CapabilityVector req = {1, 1}) {
  return {std::move(id), p, std::move(req), demand};
}

struct RandomMaft {
  std::vector<Region> regions;
  std::vector<Task> tasks;
};

RandomMaft random_maft(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.0, 1000.0), cap(1.0, 5.0), req(1.0, 3.0);
  RandomMaft m;
  const std::size_t r = 1 + rng() % 3, t = 1 + rng() % 3;
  for (std::size_t i = 0; i < r; ++i)
    m.regions.push_back({"r" + std::to_string(i), {pos(rng), pos(rng), 0}, rng() % 3, rng() % 3, 20.0, 5.0,
                         {cap(rng), cap(rng)}, {cap(rng), cap(rng)}});
  for (std::size_t j = 0; j < t; ++j)
    m.tasks.push_back({"t" + std::to_string(j), {pos(rng), pos(rng), 0}, {req(rng), req(rng)}, 1 + rng() % 2});
  return m;
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_DOUBLE_EQ(normalize(5, 5, 10), 0.0);
  EXPECT_DOUBLE_EQ(normalize(10, 5, 10), 1.0);
  EXPECT_DOUBLE_EQ(normalize(7.5, 5, 10), 0.5);
  EXPECT_DOUBLE_EQ(normalize(3, 3, 3), 0.0);
  EXPECT_THROW(normalize(1, 2, 1), ValidationError);
}

TEST(Weights, MustSumToOne) {
  EXPECT_NO_THROW(WeightConfig::time_weight(0.3).validate());
  EXPECT_THROW((WeightConfig{0.5, 0.6}.validate()), ValidationError);
  EXPECT_THROW((WeightConfig{-0.1, 1.1}.validate()), ValidationError);
}

TEST(Instance, RoutesFollowEligibility) {
  MaftInstance inst({region("strong", {0, 0, 0}, 1, 1, {5, 5}), region("weak", {1, 0, 0}, 1, 0, {1, 9})},
                    {task("t", {3, 4, 0}, 1, {2, 2})});
  ASSERT_EQ(inst.routes().size(), 2u);  // weak fails the first component
  EXPECT_DOUBLE_EQ(inst.routes()[0].distance, 5.0);
  EXPECT_DOUBLE_EQ(inst.routes()[0].time, 0.25);
  EXPECT_DOUBLE_EQ(inst.routes()[1].time, 1.0);
  EXPECT_FALSE(inst.eligible(1, AgentKind::UAV, 0));
}

TEST(Instance, FlagsInfeasibleDemand) {
  MaftInstance inst({region("r", {0, 0, 0}, 2, 1)}, {task("a", {1, 0, 0}, 2), task("b", {2, 0, 0}, 2)});
  EXPECT_FALSE(inst.feasibility().feasible);
  EXPECT_EQ(inst.feasibility().demand, 4u);
  EXPECT_EQ(inst.feasibility().supply, 3u);
  EXPECT_NE(inst.feasibility().message.find("b(p=2)"), std::string::npos);
  EXPECT_THROW(solve_w_ilp(inst, WeightConfig::time_weight(0.5)), InfeasibleError);
  EXPECT_THROW(objective_bounds(inst), InfeasibleError);
}

TEST(Instance, IneligibilityCanMakeItInfeasible) {
  MaftInstance inst({region("r", {0, 0, 0}, 5, 5, {1, 1})}, {task("a", {1, 0, 0}, 1, {2, 2})});
  EXPECT_FALSE(inst.feasibility().feasible);
}

TEST(Bounds, SingleAssignment) {
  MaftInstance inst({region("r", {0, 0, 0}, 1, 0)}, {task("t", {3, 4, 0}, 1)});
  const auto b = objective_bounds(inst);
  EXPECT_DOUBLE_EQ(b.d_min, 5.0);
  EXPECT_DOUBLE_EQ(b.d_max, 5.0);
  EXPECT_DOUBLE_EQ(b.t_min, b.t_max);
  MaftInstance both({region("r", {0, 0, 0}, 1, 1)}, {task("t", {3, 4, 0}, 1)});
  const auto bb = objective_bounds(both);
  EXPECT_DOUBLE_EQ(bb.d_min, bb.d_max);
  EXPECT_DOUBLE_EQ(bb.t_min, 0.25);
  EXPECT_DOUBLE_EQ(bb.t_max, 1.0);
}

TEST(Bounds, TwoRegions) {
  MaftInstance inst({region("near", {3, 0, 0}, 0, 1), region("far", {7, 0, 0}, 0, 1)}, {task("t", {0, 0, 0}, 1)});
  const auto b = objective_bounds(inst);
  EXPECT_DOUBLE_EQ(b.d_min, 3.0);
  EXPECT_DOUBLE_EQ(b.d_max, 7.0);
}

TEST(WIlp, DistanceWeightPicksNearRegion) {
  MaftInstance inst({region("near", {3, 0, 0}, 0, 1), region("far", {7, 0, 0}, 0, 1)}, {task("t", {0, 0, 0}, 1)});
  const auto a = solve_w_ilp(inst, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(a.raw_distance, 3.0);
  ASSERT_EQ(a.x.size(), 1u);
  EXPECT_EQ(a.x[0].region, 0u);
  EXPECT_TRUE(maft_violations(inst, a).empty());
}

TEST(WIlp, TimeWeightPrefersFastUav) {
  MaftInstance inst({region("air", {40, 0, 0}, 1, 0), region("ground", {15, 0, 0}, 0, 1)}, {task("t", {0, 0, 0}, 1)});
  const auto a = solve_w_ilp(inst, {1.0, 0.0});
  ASSERT_EQ(a.x.size(), 1u);
  EXPECT_EQ(a.x[0].kind, AgentKind::UAV);
  EXPECT_DOUBLE_EQ(a.raw_time, 2.0);
  EXPECT_DOUBLE_EQ(a.raw_distance, 40.0);
}

TEST(WIlp, TightInventorySaturates) {
  MaftInstance inst({region("a", {0, 0, 0}, 2, 1), region("b", {10, 0, 0}, 1, 2)},
                    {task("x", {1, 0, 0}, 3), task("y", {9, 0, 0}, 3)});
  const auto a = solve_w_ilp(inst, WeightConfig::time_weight(0.5));
  EXPECT_TRUE(maft_violations(inst, a).empty());
  std::size_t used = 0;
  for (const auto& x : a.x) used += x.count;
  EXPECT_EQ(used, 6u);
}

TEST(WIlp, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(2024);
  int solved = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const auto m = random_maft(rng);
    const double kt = static_cast<double>(rng() % 5) / 4.0;
    const auto best = oracle::maft_by_enumeration(m.regions, m.tasks, kt);
    MaftInstance inst(m.regions, m.tasks);
    EXPECT_EQ(inst.feasibility().feasible, best.feasible) << "trial " << trial;
    if (!best.feasible) continue;
    ++solved;
    const auto a = solve_w_ilp(inst, WeightConfig::time_weight(kt));
    EXPECT_NEAR(a.objective, best.objective, 1e-9) << "trial " << trial;
    EXPECT_NEAR(a.bounds.d_min, best.d_min, 1e-9 * std::max(1.0, best.d_min));
    EXPECT_NEAR(a.bounds.t_max, best.t_max, 1e-9 * std::max(1.0, best.t_max));
    EXPECT_TRUE(maft_violations(inst, a).empty());
    EXPECT_GE(a.objective, -1e-12);
    EXPECT_LE(a.objective, 1.0 + 1e-12);
  }
  EXPECT_GT(solved, 10);
}

TEST(WGrd, HandTraceDistanceOnly) {
  // t0 and t1 sit 10 m either side of region r0's single UGV. Greedy sends it to t0 (tie broken
  // by task order), which leaves t1 to r1's UAV 40 m away; the optimum swaps them.
  MaftInstance inst({region("r0", {0, 0, 0}, 0, 1), region("r1", {30, 0, 0}, 1, 0), region("r2", {0, 200, 0}, 1, 0)},
                    {task("t0", {10, 0, 0}, 1), task("t1", {-10, 0, 0}, 1)});
  const auto g = solve_w_grd(inst, {0.0, 1.0});
  ASSERT_EQ(g.x.size(), 2u);
  EXPECT_EQ(std::tuple(g.x[0].region, g.x[0].kind, g.x[0].task), std::tuple(0u, AgentKind::UGV, 0u));
  EXPECT_EQ(std::tuple(g.x[1].region, g.x[1].kind, g.x[1].task), std::tuple(1u, AgentKind::UAV, 1u));
  EXPECT_DOUBLE_EQ(g.raw_distance, 50.0);
  const auto opt = solve_w_ilp(inst, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(opt.raw_distance, 30.0);
  EXPECT_GT(g.objective, opt.objective);
}

TEST(WGrd, HandTraceTimeOnly) {
  // Times: r1 UAV -> t0 is 1 min, then a three-way tie at 2 min resolved by region order.
  MaftInstance inst({region("r0", {0, 0, 0}, 0, 1), region("r1", {30, 0, 0}, 1, 0), region("r2", {0, 200, 0}, 1, 0)},
                    {task("t0", {10, 0, 0}, 1), task("t1", {-10, 0, 0}, 1)});
  const auto g = solve_w_grd(inst, {1.0, 0.0});
  ASSERT_EQ(g.x.size(), 2u);
  EXPECT_EQ(std::tuple(g.x[0].region, g.x[0].task), std::tuple(0u, 1u));
  EXPECT_EQ(std::tuple(g.x[1].region, g.x[1].task), std::tuple(1u, 0u));
  EXPECT_DOUBLE_EQ(g.raw_time, 3.0);
}

TEST(WGrd, SingleChoiceEqualsIlp) {
  MaftInstance inst({region("r", {0, 0, 0}, 0, 3)}, {task("t", {6, 8, 0}, 2)});
  const auto g = solve_w_grd(inst, WeightConfig::time_weight(0.4));
  const auto i = solve_w_ilp(inst, WeightConfig::time_weight(0.4));
  EXPECT_DOUBLE_EQ(g.raw_distance, i.raw_distance);
  EXPECT_DOUBLE_EQ(g.objective, i.objective);
}

TEST(WGrd, LookaheadAvoidsStrandingDemand) {
  // Cheapest unit sends the only generalist to t0; t1 can only be served by it.
  MaftInstance inst({region("gen", {0, 0, 0}, 0, 1, {5, 5}), region("spec", {50, 0, 0}, 0, 1, {2.5, 5})},
                    {task("t0", {1, 0, 0}, 1, {2, 2}), task("t1", {40, 0, 0}, 1, {3, 3})});
  ASSERT_TRUE(inst.feasibility().feasible);
  const auto g = solve_w_grd(inst, {0.0, 1.0});
  EXPECT_TRUE(maft_violations(inst, g).empty());
  MaftOptions plain;
  plain.greedy_lookahead = false;
  EXPECT_THROW(solve_w_grd(inst, {0.0, 1.0}, plain), InfeasibleError);
}

TEST(WGrd, NeverBeatsIlp) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 80; ++trial) {
    const auto m = random_maft(rng);
    MaftInstance inst(m.regions, m.tasks);
    if (!inst.feasibility().feasible) continue;
    const auto w = WeightConfig::time_weight(static_cast<double>(rng() % 5) / 4.0);
    const auto g = solve_w_grd(inst, w);
    const auto i = solve_w_ilp(inst, w);
    EXPECT_TRUE(maft_violations(inst, g).empty());
    EXPECT_GE(g.objective, i.objective - 1e-9);
  }
}

TEST(Violations, CatchEachConstraint) {
  MaftInstance inst({region("r", {0, 0, 0}, 1, 1)}, {task("t", {1, 0, 0}, 1)});
  MaftAssignment a;
  a.x = {{0, AgentKind::UAV, 0, 2}};
  EXPECT_FALSE(maft_violations(inst, a).empty());  // inventory and demand
  a.x = {};
  EXPECT_FALSE(maft_violations(inst, a).empty());  // demand unmet
  MaftInstance weak({region("r", {0, 0, 0}, 1, 1, {1, 1})}, {task("t", {1, 0, 0}, 1)});
  a.x = {{0, AgentKind::UAV, 0, 1}};
  EXPECT_FALSE(maft_violations(weak, a).empty());  // ineligible
}

TEST(Pareto, EndpointsAndFlags) {
  std::mt19937_64 rng(5);
  int checked = 0;
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 40 && checked < 10; ++trial) {
    const auto m = random_maft(rng);
    MaftInstance inst(m.regions, m.tasks);
    if (!inst.feasibility().feasible) continue;
    ++checked;
    const auto b = objective_bounds(inst);
    const auto pts = pareto_sweep(inst, grid);
    ASSERT_EQ(pts.size(), grid.size());
    EXPECT_NEAR(pts.front().distance, b.d_min, 1e-9 * std::max(1.0, b.d_min));
    EXPECT_NEAR(pts.back().time, b.t_min, 1e-9 * std::max(1.0, b.t_min));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_LE(pts[i].time, pts[i - 1].time + 1e-9 * std::max(1.0, pts[i - 1].time));
      EXPECT_GE(pts[i].distance, pts[i - 1].distance - 1e-9 * std::max(1.0, pts[i - 1].distance));
    }
    for (const auto& p : pts)
      for (const auto& o : pts)
        if (p.pareto && o.pareto) {
          EXPECT_FALSE(o.time < p.time - 1e-9 && o.distance < p.distance - 1e-9);
        }
  }
  EXPECT_GT(checked, 0);
}

TEST(Pareto, ErrorsAreRecordedPerPoint) {
  MaftInstance inst({region("r", {0, 0, 0}, 1, 0)}, {task("t", {1, 0, 0}, 2)});
  const std::vector<double> grid{0.0, 1.0};
  const auto pts = pareto_sweep(inst, grid);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_FALSE(pts[0].error.empty());
  EXPECT_FALSE(pts[0].pareto);
}
