#include <gtest/gtest.h>

#include <random>

#include "agco/model.hpp"

using namespace agco;

TEST(Distance, ThreeFourFive) { EXPECT_DOUBLE_EQ(euclidean_distance({0, 0, 0}, {3, 4, 0}), 5.0); }

TEST(Distance, Identity) { EXPECT_DOUBLE_EQ(euclidean_distance({1, 2, 3}, {1, 2, 3}), 0.0); }

TEST(Distance, UsesAltitude) { EXPECT_DOUBLE_EQ(euclidean_distance({0, 0, 0}, {1, 2, 2}), 3.0); }

TEST(Distance, PlanarIgnoresAltitude) { EXPECT_DOUBLE_EQ(planar_distance({0, 0, 7}, {3, 4, 0}), 5.0); }

TEST(Distance, TriangleInequalityAndSymmetry) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-500.0, 500.0), h(0.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const Position a{u(rng), u(rng), h(rng)}, b{u(rng), u(rng), h(rng)}, c{u(rng), u(rng), h(rng)};
    EXPECT_LE(euclidean_distance(a, c), euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9);
    EXPECT_DOUBLE_EQ(euclidean_distance(a, b), euclidean_distance(b, a));
    EXPECT_GE(euclidean_distance(a, b), 0.0);
  }
}

TEST(Capability, StrictDominanceGivesTwo) {
  EXPECT_EQ(capability_coefficient({2, 3}, {1, 2}), 2.0);
  EXPECT_EQ(capability_coefficient({1, 2}, {1, 2}), 0.5);
  EXPECT_EQ(capability_coefficient({9}, {10}), 0.5);
}

TEST(Capability, LengthMismatchThrows) {
  EXPECT_THROW(capability_coefficient({1, 2}, {1}), DimensionError);
  EXPECT_THROW(effectiveness({1}, {1, 2}), DimensionError);
}

TEST(Capability, EffectivenessHandValues) {
  EXPECT_DOUBLE_EQ(effectiveness({2, 4}, {1, 2}), 8.0);
  EXPECT_DOUBLE_EQ(effectiveness({1, 1}, {1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(effectiveness({1, 1}, {2, 2}), 0.5);
}

TEST(Capability, CoefficientMatchesEffectivenessAndScales) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  for (int i = 0; i < 500; ++i) {
    const CapabilityVector a{u(rng), u(rng), u(rng)}, t{u(rng), u(rng), u(rng)};
    double ratio = 0.0;
    for (std::size_t k = 0; k < 3; ++k) ratio += a[k] / t[k];
    EXPECT_EQ(capability_coefficient(a, t) == 2.0, effectiveness(a, t) > ratio);
    EXPECT_EQ(is_eligible(a, t), capability_coefficient(a, t) == 2.0);
    const double s = u(rng);
    const CapabilityVector as{a[0] * s, a[1] * s, a[2] * s}, ts{t[0] * s, t[1] * s, t[2] * s};
    EXPECT_NEAR(effectiveness(as, ts), effectiveness(a, t), 1e-12 * effectiveness(a, t));
  }
}

namespace {

Agent uav(std::string id) {
  return {std::move(id), AgentKind::UAV, {0, 0, 10}, 20.0, {2, 2}, 100.0, 2};
}

}  // namespace

TEST(Validation, AcceptsWellFormedScenario) {
  FamtScenario s{{uav("a")}, {{"t", {1, 1, 0}, {1, 1}, 1}}};
  EXPECT_NO_THROW(validate(s));
}

TEST(Validation, RejectsBadAgents) {
  Agent a = uav("a");
  a.kind = AgentKind::UGV;
  EXPECT_THROW(validate(a), ValidationError);  // UGV above ground
  a = uav("a");
  a.speed = 0.0;
  EXPECT_THROW(validate(a), ValidationError);
  a = uav("a");
  a.task_limit = 0;
  EXPECT_THROW(validate(a), ValidationError);
  a = uav("a");
  a.max_travel = -1.0;
  EXPECT_THROW(validate(a), ValidationError);
  a = uav("a");
  a.capabilities = CapabilityVector{1, 0};
  EXPECT_THROW(validate(a), ValidationError);
}

TEST(Validation, RejectsBadTasksAndScenarios) {
  Task t{"t", {0, 0, 0}, {1, 1}, 0};
  EXPECT_THROW(validate(t), ValidationError);
  FamtScenario dup{{uav("a"), uav("a")}, {}};
  EXPECT_THROW(validate(dup), ValidationError);
  FamtScenario dims{{uav("a")}, {{"t", {0, 0, 0}, {1, 1, 1}, 1}}};
  EXPECT_THROW(validate(dims), DimensionError);
}

TEST(Kinds, RoundTripNames) {
  EXPECT_EQ(agent_kind_from_string(to_string(AgentKind::UAV)), AgentKind::UAV);
  EXPECT_EQ(agent_kind_from_string(to_string(AgentKind::UGV)), AgentKind::UGV);
  EXPECT_THROW(agent_kind_from_string("boat"), ValidationError);
}
