#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agco/grouping.hpp"
#include "agco/model.hpp"

namespace agco {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  double norm() const { return std::hypot(x, y); }
  bool is_zero() const { return x == 0.0 && y == 0.0; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct ChargingUav {
  std::string id;
  Position position;
  MetersPerMinute speed{20.0};
  double energy{1.0};             // remaining battery, energy units
  double consumption_rate{0.002};  // energy per meter flown
  double task_drain{0.0};          // energy per minute while still working

  friend bool operator==(const ChargingUav&, const ChargingUav&) = default;
};

struct ChargingScenario {
  std::string id;
  Position ugv;  // h = 0
  MetersPerMinute ugv_max_speed{5.0};
  std::vector<ChargingUav> uavs;
  double k{1.0};                  // UGV speed proportionality constant
  Meters charging_distance{5.0};  // planar docking threshold D
  double reserve_factor{0.2};     // return trigger: E <= (1 + reserve) * rate * distance

  friend bool operator==(const ChargingScenario&, const ChargingScenario&) = default;
};

inline void validate(const ChargingScenario& s) {
  if (!is_valid(s.ugv) || s.ugv.h != 0.0) throw ValidationError("charging: UGV position must be finite with h = 0");
  if (!(s.ugv_max_speed > 0.0)) throw ValidationError("charging: UGV max speed must be positive");
  if (!(s.k > 0.0)) throw ValidationError("charging: k must be positive");
  if (!(s.charging_distance > 0.0)) throw ValidationError("charging: charging distance must be positive");
  if (!(s.reserve_factor >= 0.0)) throw ValidationError("charging: reserve factor must be non-negative");
  for (const auto& u : s.uavs) {
    if (!is_valid(u.position)) throw ValidationError("charging: UAV " + u.id + " has an invalid position");
    if (!(u.speed > 0.0)) throw ValidationError("charging: UAV " + u.id + " speed must be positive");
    if (!(u.energy > 0.0)) throw ValidationError("charging: UAV " + u.id + " energy must be positive");
    if (!(u.consumption_rate >= 0.0) || !(u.task_drain >= 0.0))
      throw ValidationError("charging: UAV " + u.id + " consumption must be non-negative");
  }
}

enum class UavState { Working, Returning, Charged, Exhausted };

inline const char* to_string(UavState s) {
  switch (s) {
    case UavState::Working: return "working";
    case UavState::Returning: return "returning";
    case UavState::Charged: return "charged";
    case UavState::Exhausted: return "exhausted";
  }
  return "?";
}

/// Kinematic state of a UAV heading back to the UGV.
struct ReturningUav {
  Position position;
  MetersPerMinute speed;
  double energy;
};

/// Unit vector along the summed UGV -> UAV offsets; zero when they cancel.
inline Vec2 ugv_direction(const Position& ugv, std::span<const Position> uavs) {
  Vec2 sum;
  for (const auto& p : uavs) {
    sum.x += p.x - ugv.x;
    sum.y += p.y - ugv.y;
  }
  const double n = sum.norm();
  if (n < 1e-9) return {};
  return {sum.x / n, sum.y / n};
}

/// Sum of k * d_i / (v_i * E_i) over returning UAVs, clamped to the UGV's top speed.
inline MetersPerMinute ugv_speed(const Position& ugv, std::span<const ReturningUav> uavs, double k,
                                 MetersPerMinute max_speed) {
  double v = 0.0;
  for (const auto& u : uavs) {
    if (u.energy <= 0.0) return max_speed;
    v += k * planar_distance(ugv, u.position) / (u.speed * u.energy);
  }
  return std::min(v, max_speed);
}

struct TrajectorySample {
  Minutes t;
  std::string entity;
  double x, y;
  double energy;  // NaN for the UGV
  std::string state;
};

struct SimOptions {
  Minutes dt{0.1};
  Minutes horizon{10'000.0};
  bool record_trajectory{false};
};

struct SimResult {
  std::string algorithm;
  std::vector<Meters> uav_distance;
  Meters ugv_distance{0.0};
  Meters total_distance{0.0};
  Minutes time_to_last_charge{0.0};
  std::vector<std::optional<Minutes>> charge_time;
  std::vector<double> final_energy;
  std::vector<UavState> final_state;
  bool complete{false};  // every UAV charged
  std::size_t steps{0};
  std::vector<TrajectorySample> trajectory;
};

namespace detail {

/// Earliest s in (0, limit] with |r0 + rv s| = radius, assuming |r0| > radius.
inline std::optional<double> first_contact(Vec2 r0, Vec2 rv, double radius, double limit) {
  const double a = rv.x * rv.x + rv.y * rv.y;
  if (a <= 0.0) return std::nullopt;
  const double b = 2.0 * (r0.x * rv.x + r0.y * rv.y);
  const double c = r0.x * r0.x + r0.y * r0.y - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double s = (-b - std::sqrt(disc)) / (2.0 * a);
  if (s < 0.0 || s > limit) return std::nullopt;
  return s;
}

inline SimResult simulate(const ChargingScenario& sc, const SimOptions& opt, bool mobile_ugv) {
  validate(sc);
  if (!(opt.dt > 0.0)) throw ValidationError("simulation step dt must be positive");
  if (!std::isfinite(opt.horizon) || opt.horizon < 0.0) throw ValidationError("simulation horizon must be finite");

  const std::size_t n = sc.uavs.size();
  const double D = sc.charging_distance;
  SimResult r;
  r.algorithm = mobile_ugv ? "pctp" : "static";
  r.uav_distance.assign(n, 0.0);
  r.charge_time.assign(n, std::nullopt);
  r.final_state.assign(n, UavState::Working);
  std::vector<Position> pos(n);
  std::vector<double> energy(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = sc.uavs[i].position;
    energy[i] = sc.uavs[i].energy;
  }
  Position ugv = sc.ugv;
  auto& state = r.final_state;

  auto update_modes = [&](Minutes t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == UavState::Charged || state[i] == UavState::Exhausted) continue;
      const Meters d = planar_distance(ugv, pos[i]);
      if (d <= D * (1.0 + 1e-12)) {
        state[i] = UavState::Charged;
        r.charge_time[i] = t;
      } else if (energy[i] <= 0.0) {
        state[i] = UavState::Exhausted;
      } else if (state[i] == UavState::Working &&
                 energy[i] <= (1.0 + sc.reserve_factor) * sc.uavs[i].consumption_rate * d) {
        state[i] = UavState::Returning;
      }
    }
  };
  auto record = [&](Minutes t) {
    if (!opt.record_trajectory) return;
    r.trajectory.push_back({t, "ugv", ugv.x, ugv.y, std::numeric_limits<double>::quiet_NaN(), "moving"});
    for (std::size_t i = 0; i < n; ++i)
      r.trajectory.push_back({t, sc.uavs[i].id, pos[i].x, pos[i].y, energy[i], to_string(state[i])});
  };
  auto settled = [&] {
    for (auto s : state)
      if (s == UavState::Working || s == UavState::Returning) return false;
    return true;
  };
  auto any_exhausted = [&] {
    return std::any_of(state.begin(), state.end(), [](UavState s) { return s == UavState::Exhausted; });
  };

  Minutes t = 0.0;
  update_modes(t);
  record(t);
  while (!settled() && !any_exhausted() && t < opt.horizon - 1e-12) {
    Minutes left = std::min(opt.dt, opt.horizon - t);
    // Within a step headings stay fixed; charge and exhaustion events split the step exactly.
    while (left > 1e-12 && !settled() && !any_exhausted()) {
      std::vector<std::size_t> returning;
      std::vector<ReturningUav> kin;
      std::vector<Position> returning_pos;
      for (std::size_t i = 0; i < n; ++i)
        if (state[i] == UavState::Returning) {
          returning.push_back(i);
          kin.push_back({pos[i], sc.uavs[i].speed, energy[i]});
          returning_pos.push_back(pos[i]);
        }

      Vec2 ugv_vel;
      if (mobile_ugv && !returning.empty()) {
        const Vec2 dir = ugv_direction(ugv, returning_pos);
        const double s = ugv_speed(ugv, kin, sc.k, sc.ugv_max_speed);
        ugv_vel = {dir.x * s, dir.y * s};
      }
      std::vector<Vec2> vel(n);
      for (std::size_t i : returning) {
        const double dx = ugv.x - pos[i].x, dy = ugv.y - pos[i].y;
        const double d = std::hypot(dx, dy);
        vel[i] = {dx / d * sc.uavs[i].speed, dy / d * sc.uavs[i].speed};
      }

      double span = left;
      for (std::size_t i : returning) {
        const Vec2 r0{pos[i].x - ugv.x, pos[i].y - ugv.y};
        const Vec2 rv{vel[i].x - ugv_vel.x, vel[i].y - ugv_vel.y};
        if (auto s = first_contact(r0, rv, D, span)) span = std::min(span, *s);
        const double burn = sc.uavs[i].consumption_rate * sc.uavs[i].speed;
        if (burn > 0.0) span = std::min(span, energy[i] / burn);
      }
      for (std::size_t i = 0; i < n; ++i)
        if (state[i] == UavState::Working && sc.uavs[i].task_drain > 0.0)
          span = std::min(span, energy[i] / sc.uavs[i].task_drain);

      for (std::size_t i = 0; i < n; ++i) {
        if (state[i] == UavState::Returning) {
          const Meters step = sc.uavs[i].speed * span;
          pos[i].x += vel[i].x * span;
          pos[i].y += vel[i].y * span;
          r.uav_distance[i] += step;
          energy[i] = std::max(0.0, energy[i] - sc.uavs[i].consumption_rate * step);
        } else if (state[i] == UavState::Working) {
          energy[i] = std::max(0.0, energy[i] - sc.uavs[i].task_drain * span);
        }
      }
      ugv.x += ugv_vel.x * span;
      ugv.y += ugv_vel.y * span;
      r.ugv_distance += ugv_vel.norm() * span;
      t += span;
      left -= span;
      // Snap tiny residual rounding so an event at the step boundary registers.
      for (std::size_t i : returning) {
        const Meters d = planar_distance(ugv, pos[i]);
        if (d <= D * (1.0 + 1e-9) && energy[i] >= 0.0) {
          state[i] = UavState::Charged;
          r.charge_time[i] = t;
        }
      }
      update_modes(t);
    }
    ++r.steps;
    record(t);
  }

  r.final_energy = energy;
  r.complete = std::all_of(state.begin(), state.end(), [](UavState s) { return s == UavState::Charged; });
  for (const auto& ct : r.charge_time)
    if (ct) r.time_to_last_charge = std::max(r.time_to_last_charge, *ct);
  for (Meters d : r.uav_distance) r.total_distance += d;
  r.total_distance += r.ugv_distance;
  return r;
}

}  // namespace detail

/// Predictive charging: the UGV drives along the summed UAV offsets at the k*d/(v*E) speed.
inline SimResult run_pctp(const ChargingScenario& s, const SimOptions& options = {}) {
  return detail::simulate(s, options, true);
}

/// Baseline: the UGV stays put while UAVs fly straight to it.
inline SimResult run_static(const ChargingScenario& s, const SimOptions& options = {}) {
  return detail::simulate(s, options, false);
}

// ---------------------------------------------------------------------------
// Fleets with several UGVs
// ---------------------------------------------------------------------------

struct ChargingFleet {
  std::vector<Position> ugvs;
  MetersPerMinute ugv_max_speed{5.0};
  std::vector<ChargingUav> uavs;
  double k{1.0};
  Meters charging_distance{5.0};
  double reserve_factor{0.2};
};

enum class GroupingMethod { Nearest, KMeans };

/// Assigns each UAV to a UGV (nearest UGV, or k-means seeded at the UGV positions) and returns
/// one single-UGV scenario per UGV.
inline std::vector<ChargingScenario> split_fleet(const ChargingFleet& fleet, GroupingMethod method) {
  std::vector<Position> points;
  for (const auto& u : fleet.uavs) points.push_back({u.position.x, u.position.y, 0.0});
  std::vector<Position> seeds;
  for (const auto& g : fleet.ugvs) seeds.push_back({g.x, g.y, 0.0});
  const std::vector<std::size_t> labels = method == GroupingMethod::Nearest
                                              ? nearest_seed_assignment(points, seeds)
                                              : group_tasks_kmeans(points, seeds.size(), seeds).labels;
  std::vector<ChargingScenario> out(fleet.ugvs.size());
  for (std::size_t g = 0; g < fleet.ugvs.size(); ++g) {
    out[g].id = "ugv" + std::to_string(g);
    out[g].ugv = fleet.ugvs[g];
    out[g].ugv_max_speed = fleet.ugv_max_speed;
    out[g].k = fleet.k;
    out[g].charging_distance = fleet.charging_distance;
    out[g].reserve_factor = fleet.reserve_factor;
  }
  for (std::size_t i = 0; i < fleet.uavs.size(); ++i) out[labels[i]].uavs.push_back(fleet.uavs[i]);
  return out;
}

}  // namespace agco
