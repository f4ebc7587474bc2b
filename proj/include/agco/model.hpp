#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace agco {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct InfeasibleError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

using Meters = double;
using MetersPerMinute = double;
using Minutes = double;

struct Position {
  Meters x{0.0};
  Meters y{0.0};
  Meters h{0.0};  // altitude

  friend bool operator==(const Position&, const Position&) = default;
};

inline bool is_valid(const Position& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.h) && p.h >= 0.0;
}

inline Meters euclidean_distance(const Position& a, const Position& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double dh = b.h - a.h;
  return std::sqrt(dx * dx + dy * dy + dh * dh);
}

inline Meters planar_distance(const Position& a, const Position& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

// ---------------------------------------------------------------------------
// Agents and tasks
// ---------------------------------------------------------------------------

enum class AgentKind { UAV, UGV };

inline const char* to_string(AgentKind k) { return k == AgentKind::UAV ? "UAV" : "UGV"; }

inline AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "UAV" || s == "uav") return AgentKind::UAV;
  if (s == "UGV" || s == "ugv") return AgentKind::UGV;
  throw ValidationError("unknown agent kind '" + s + "'");
}

/// Positive capability magnitudes, one per capability type.
class CapabilityVector {
 public:
  CapabilityVector() = default;
  CapabilityVector(std::initializer_list<double> levels) : levels_(levels) {}
  explicit CapabilityVector(std::vector<double> levels) : levels_(std::move(levels)) {}

  std::size_t size() const { return levels_.size(); }
  bool empty() const { return levels_.empty(); }
  double operator[](std::size_t i) const { return levels_[i]; }
  const std::vector<double>& levels() const { return levels_; }

  bool is_valid() const {
    if (levels_.empty()) return false;
    for (double v : levels_)
      if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const CapabilityVector&, const CapabilityVector&) = default;

 private:
  std::vector<double> levels_;
};

struct Agent {
  std::string id;
  AgentKind kind{AgentKind::UGV};
  Position position;
  MetersPerMinute speed{1.0};
  CapabilityVector capabilities;
  Meters max_travel{std::numeric_limits<double>::infinity()};  // endurance bound S
  std::size_t task_limit{1};                                     // q

  friend bool operator==(const Agent&, const Agent&) = default;
};

struct Task {
  std::string id;
  Position position;
  CapabilityVector requirements;
  std::size_t max_agents{1};  // p: upper bound (FAMT) or exact demand (MAFT)

  friend bool operator==(const Task&, const Task&) = default;
};

struct FamtScenario {
  std::vector<Agent> agents;
  std::vector<Task> tasks;

  friend bool operator==(const FamtScenario&, const FamtScenario&) = default;
};

// ---------------------------------------------------------------------------
// Capability scoring
// ---------------------------------------------------------------------------

inline void require_same_dimension(const CapabilityVector& a, const CapabilityVector& b) {
  if (a.size() != b.size())
    throw DimensionError("capability vectors differ in length (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
}

/// 2 when the agent strictly dominates the task on every component, 1/2 otherwise.
inline double capability_coefficient(const CapabilityVector& agent, const CapabilityVector& task) {
  require_same_dimension(agent, task);
  for (std::size_t k = 0; k < agent.size(); ++k)
    if (!(agent[k] > task[k])) return 0.5;
  return 2.0;
}

inline double effectiveness(const CapabilityVector& agent, const CapabilityVector& task) {
  require_same_dimension(agent, task);
  double ratio_sum = 0.0;
  for (std::size_t k = 0; k < agent.size(); ++k) ratio_sum += agent[k] / task[k];
  return ratio_sum * capability_coefficient(agent, task);
}

/// Eligibility for exclusive (more-agents-than-tasks) allocation: strict dominance.
inline bool is_eligible(const CapabilityVector& agent, const CapabilityVector& task) {
  return capability_coefficient(agent, task) == 2.0;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline void validate(const Agent& a) {
  if (!is_valid(a.position)) throw ValidationError("agent " + a.id + ": invalid position");
  if (a.kind == AgentKind::UGV && a.position.h != 0.0)
    throw ValidationError("agent " + a.id + ": UGV must be on the ground plane (h = 0)");
  if (!(a.speed > 0.0)) throw ValidationError("agent " + a.id + ": speed must be positive");
  if (!(a.max_travel > 0.0)) throw ValidationError("agent " + a.id + ": max_travel must be positive");
  if (a.task_limit < 1) throw ValidationError("agent " + a.id + ": task_limit must be at least 1");
  if (!a.capabilities.is_valid()) throw ValidationError("agent " + a.id + ": invalid capability vector");
}

inline void validate(const Task& t) {
  if (!is_valid(t.position)) throw ValidationError("task " + t.id + ": invalid position");
  if (t.max_agents < 1) throw ValidationError("task " + t.id + ": max_agents must be at least 1");
  if (!t.requirements.is_valid()) throw ValidationError("task " + t.id + ": invalid requirement vector");
}

inline void validate(const FamtScenario& s) {
  std::vector<std::string> ids;
  std::size_t dim = 0;
  bool have_dim = false;
  auto check_dim = [&](const CapabilityVector& c, const std::string& who) {
    if (!have_dim) {
      dim = c.size();
      have_dim = true;
    } else if (c.size() != dim) {
      throw DimensionError(who + ": capability length " + std::to_string(c.size()) + " differs from " +
                           std::to_string(dim));
    }
  };
  for (const auto& a : s.agents) {
    validate(a);
    check_dim(a.capabilities, "agent " + a.id);
    ids.push_back("a:" + a.id);
  }
  for (const auto& t : s.tasks) {
    validate(t);
    check_dim(t.requirements, "task " + t.id);
    ids.push_back("t:" + t.id);
  }
  std::sort(ids.begin(), ids.end());
  if (auto it = std::adjacent_find(ids.begin(), ids.end()); it != ids.end())
    throw ValidationError("duplicate id '" + it->substr(2) + "'");
}

}  // namespace agco
