#include <gtest/gtest.h>

#include <cmath>

#include "agco/charging.hpp"

using namespace agco;

namespace {

ChargingUav uav(std::string id, double x, double y, double energy) {
  ChargingUav u;
  u.id = std::move(id);
  u.position = {x, y, 10.0};
  u.energy = energy;
  return u;
}

ChargingScenario single(double x, double y, double energy) {
  ChargingScenario s;
  s.id = "s";
  s.uavs = {uav("u0", x, y, energy)};
  return s;
}

}  // namespace

TEST(Direction, SumsOffsets) {
  const std::vector<Position> p{{10, 0, 0}, {0, 10, 0}};
  const auto d = ugv_direction({0, 0, 0}, p);
  EXPECT_NEAR(d.x, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(d.y, std::sqrt(0.5), 1e-12);
}

TEST(Direction, OpposingOffsetsCancel) {
  const std::vector<Position> p{{10, 0, 0}, {-10, 0, 0}};
  EXPECT_TRUE(ugv_direction({0, 0, 0}, p).is_zero());
  EXPECT_TRUE(ugv_direction({0, 0, 0}, {}).is_zero());
}

TEST(Speed, ProportionalAndClamped) {
  const std::vector<ReturningUav> one{{{100, 0, 0}, 20.0, 1.0}};
  EXPECT_DOUBLE_EQ(ugv_speed({0, 0, 0}, one, 1.0, 100.0), 5.0);
  EXPECT_DOUBLE_EQ(ugv_speed({0, 0, 0}, one, 2.0, 100.0), 10.0);
  EXPECT_DOUBLE_EQ(ugv_speed({0, 0, 0}, one, 1.0, 3.0), 3.0);
  const std::vector<ReturningUav> two{{{100, 0, 0}, 20.0, 1.0}, {{0, 40, 0}, 20.0, 0.5}};
  EXPECT_DOUBLE_EQ(ugv_speed({0, 0, 0}, two, 1.0, 100.0), 9.0);
}

TEST(Static, StraightLineFlight) {
  const auto s = single(100, 0, 0.2);  // returns at once: 0.2 <= 1.2 * 0.002 * 100
  const auto r = run_static(s);
  ASSERT_TRUE(r.complete);
  EXPECT_NEAR(r.uav_distance[0], 95.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.ugv_distance, 0.0);
  EXPECT_NEAR(*r.charge_time[0], 4.75, 1e-9);
  EXPECT_NEAR(r.final_energy[0], 0.2 - 0.002 * 95.0, 1e-12);
}

TEST(Pctp, HeadOnMeeting) {
  // UGV speed 1*d/(20*E) stays above the 5 m/min cap all the way in, so closure is 25 m/min.
  const auto r = run_pctp(single(100, 0, 0.2));
  ASSERT_TRUE(r.complete);
  EXPECT_NEAR(*r.charge_time[0], 3.8, 1e-9);
  EXPECT_NEAR(r.uav_distance[0], 76.0, 1e-9);
  EXPECT_NEAR(r.ugv_distance, 19.0, 1e-9);
  EXPECT_NEAR(r.total_distance, 95.0, 1e-9);
  EXPECT_LT(r.time_to_last_charge, run_static(single(100, 0, 0.2)).time_to_last_charge);
}

TEST(Pctp, SymmetricPairKeepsUgvStill) {
  ChargingScenario s;
  s.uavs = {uav("a", 100, 0, 0.2), uav("b", -100, 0, 0.2)};
  const auto r = run_pctp(s);
  ASSERT_TRUE(r.complete);
  EXPECT_NEAR(r.ugv_distance, 0.0, 1e-9);
  EXPECT_NEAR(*r.charge_time[0], 4.75, 1e-9);
  EXPECT_NEAR(*r.charge_time[1], 4.75, 1e-9);
}

TEST(Sim, StartingInsideRadiusChargesAtZero) {
  const auto r = run_pctp(single(3, 0, 0.5));
  ASSERT_TRUE(r.complete);
  EXPECT_DOUBLE_EQ(*r.charge_time[0], 0.0);
  EXPECT_DOUBLE_EQ(r.total_distance, 0.0);
}

TEST(Sim, TooLittleEnergyIsExhausted) {
  const auto r = run_static(single(100, 0, 0.1));
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(r.final_state[0], UavState::Exhausted);
  EXPECT_DOUBLE_EQ(r.final_energy[0], 0.0);
  EXPECT_NEAR(r.uav_distance[0], 50.0, 1e-9);
}

TEST(Sim, WorkingUavsWaitForTheirThreshold) {
  auto s = single(100, 0, 1.0);
  s.uavs[0].task_drain = 0.1;  // hits 0.24 after 7.6 min of work
  const auto r = run_static(s);
  ASSERT_TRUE(r.complete);
  EXPECT_NEAR(*r.charge_time[0], 7.6 + 4.75, 1e-6);
}

TEST(Sim, EnergyBookkeeping) {
  ChargingScenario s;
  s.uavs = {uav("a", 200, 50, 0.5), uav("b", 30, 260, 0.6), uav("c", 150, 150, 0.45)};
  for (bool mobile : {false, true}) {
    const auto r = mobile ? run_pctp(s) : run_static(s);
    for (std::size_t i = 0; i < s.uavs.size(); ++i)
      EXPECT_NEAR(r.final_energy[i], s.uavs[i].energy - s.uavs[i].consumption_rate * r.uav_distance[i], 1e-12);
  }
}

TEST(Sim, TrajectoryRespectsStep) {
  ChargingScenario s;
  s.uavs = {uav("a", 200, 50, 0.5), uav("b", 30, 260, 0.6)};
  SimOptions o;
  o.dt = 0.25;
  o.record_trajectory = true;
  const auto r = run_pctp(s, o);
  ASSERT_GT(r.trajectory.size(), 3u);
  double last = 0.0;
  for (const auto& sample : r.trajectory) {
    EXPECT_LE(sample.t - last, o.dt + 1e-9);
    EXPECT_GE(sample.t, last);
    last = sample.t;
  }
}

TEST(Sim, Deterministic) {
  ChargingScenario s;
  s.uavs = {uav("a", 200, 50, 0.5), uav("b", 30, 260, 0.6), uav("c", 150, 150, 0.45)};
  const auto a = run_pctp(s), b = run_pctp(s);
  EXPECT_EQ(a.uav_distance, b.uav_distance);
  EXPECT_EQ(a.charge_time, b.charge_time);
  EXPECT_EQ(a.ugv_distance, b.ugv_distance);
}

TEST(Sim, RejectsBadInputs) {
  SimOptions o;
  o.dt = 0.0;
  EXPECT_THROW(run_pctp(single(10, 0, 1), o), ValidationError);
  o.dt = -1.0;
  EXPECT_THROW(run_static(single(10, 0, 1), o), ValidationError);
  auto s = single(10, 0, 1);
  s.charging_distance = 0.0;
  EXPECT_THROW(run_pctp(s), ValidationError);
  s = single(10, 0, 0.0);
  EXPECT_THROW(run_pctp(s), ValidationError);
}

TEST(Fleet, SplitsByNearestUgv) {
  ChargingFleet f;
  f.ugvs = {{0, 0, 0}, {1000, 0, 0}};
  f.uavs = {uav("a", 10, 0, 1), uav("b", 990, 0, 1), uav("c", 400, 0, 1)};
  const auto parts = split_fleet(f, GroupingMethod::Nearest);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].uavs.size(), 2u);
  EXPECT_EQ(parts[1].uavs[0].id, "b");
}
