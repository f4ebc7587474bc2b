#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "agco/grouping.hpp"
#include "agco/lp.hpp"
#include "agco/mcmf.hpp"
#include "agco/model.hpp"

namespace agco {

inline constexpr std::array<AgentKind, 2> kAgentKinds{AgentKind::UAV, AgentKind::UGV};

inline std::size_t kind_index(AgentKind k) { return k == AgentKind::UAV ? 0 : 1; }

/// A privacy-preserving area: all member agents are located at its representative position.
struct Region {
  std::string id;
  Position position;
  std::size_t uav_count{0};
  std::size_t ugv_count{0};
  MetersPerMinute uav_speed{20.0};
  MetersPerMinute ugv_speed{5.0};
  CapabilityVector uav_capabilities;
  CapabilityVector ugv_capabilities;

  std::size_t count(AgentKind k) const { return k == AgentKind::UAV ? uav_count : ugv_count; }
  MetersPerMinute speed(AgentKind k) const { return k == AgentKind::UAV ? uav_speed : ugv_speed; }
  const CapabilityVector& capabilities(AgentKind k) const {
    return k == AgentKind::UAV ? uav_capabilities : ugv_capabilities;
  }
  std::size_t inventory() const { return uav_count + ugv_count; }

  friend bool operator==(const Region&, const Region&) = default;
};

/// One eligible (region, kind, task) triple.
struct Route {
  std::size_t region;
  AgentKind kind;
  std::size_t task;
  Meters distance;
  Minutes time;
};

struct FeasibilityReport {
  bool feasible{true};
  std::size_t demand{0};
  std::size_t supply{0};
  std::vector<std::size_t> unmet_tasks;
  std::string message;
};

class MaftInstance {
 public:
  MaftInstance() = default;
  MaftInstance(std::vector<Region> regions, std::vector<Task> tasks)
      : regions_(std::move(regions)), tasks_(std::move(tasks)) {
    validate_inputs();
    for (std::size_t i = 0; i < regions_.size(); ++i) {
      for (AgentKind k : kAgentKinds) {
        if (regions_[i].count(k) == 0) continue;
        for (std::size_t j = 0; j < tasks_.size(); ++j) {
          if (!is_eligible(regions_[i].capabilities(k), tasks_[j].requirements)) continue;
          const Meters d = euclidean_distance(regions_[i].position, tasks_[j].position);
          routes_.push_back({i, k, j, d, d / regions_[i].speed(k)});
        }
      }
    }
    check_feasibility();
  }

  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<Route>& routes() const { return routes_; }
  const FeasibilityReport& feasibility() const { return feasibility_; }

  bool eligible(std::size_t region, AgentKind kind, std::size_t task) const {
    return regions_.at(region).count(kind) > 0 &&
           is_eligible(regions_[region].capabilities(kind), tasks_.at(task).requirements);
  }

  void require_feasible() const {
    if (!feasibility_.feasible) throw InfeasibleError(feasibility_.message);
  }

  friend bool operator==(const MaftInstance& a, const MaftInstance& b) {
    return a.regions_ == b.regions_ && a.tasks_ == b.tasks_;
  }

 private:
  void validate_inputs() const {
    std::size_t dim = 0;
    bool have_dim = false;
    auto check = [&](const CapabilityVector& c, const std::string& who) {
      if (!c.is_valid()) throw ValidationError(who + ": invalid capability vector");
      if (!have_dim) {
        dim = c.size();
        have_dim = true;
      } else if (c.size() != dim) {
        throw DimensionError(who + ": capability length differs");
      }
    };
    for (const auto& r : regions_) {
      if (!is_valid(r.position)) throw ValidationError("region " + r.id + ": invalid position");
      if (!(r.uav_speed > 0.0) || !(r.ugv_speed > 0.0)) throw ValidationError("region " + r.id + ": speeds must be positive");
      check(r.uav_capabilities, "region " + r.id + " UAV");
      check(r.ugv_capabilities, "region " + r.id + " UGV");
    }
    for (const auto& t : tasks_) {
      validate(t);
      check(t.requirements, "task " + t.id);
    }
  }

  // Exact supply/demand check as a max-flow: (region, kind) -> eligible task -> sink.
  void check_feasibility() {
    feasibility_ = {};
    for (const auto& t : tasks_) feasibility_.demand += t.max_agents;
    for (const auto& r : regions_) feasibility_.supply += r.inventory();
    const std::size_t supplies = regions_.size() * 2;
    const flow::NodeId source = 0;
    const flow::NodeId sink = 1 + supplies + tasks_.size();
    flow::FlowGraph g(sink + 1, source, sink);
    for (std::size_t i = 0; i < regions_.size(); ++i)
      for (AgentKind k : kAgentKinds)
        g.add_edge(source, 1 + 2 * i + kind_index(k), static_cast<flow::Capacity>(regions_[i].count(k)), 0.0);
    for (const auto& r : routes_)
      g.add_edge(1 + 2 * r.region + kind_index(r.kind), 1 + supplies + r.task,
                 static_cast<flow::Capacity>(tasks_[r.task].max_agents), 0.0);
    std::vector<flow::EdgeId> demand_edges;
    for (std::size_t j = 0; j < tasks_.size(); ++j)
      demand_edges.push_back(
          g.add_edge(1 + supplies + j, sink, static_cast<flow::Capacity>(tasks_[j].max_agents), 0.0));
    const auto result = flow::min_cost_max_flow(g);
    for (std::size_t j = 0; j < tasks_.size(); ++j)
      if (result.edge_flow[demand_edges[j]] < static_cast<flow::Capacity>(tasks_[j].max_agents))
        feasibility_.unmet_tasks.push_back(j);
    feasibility_.feasible = feasibility_.unmet_tasks.empty();
    if (!feasibility_.feasible) {
      std::string msg = "infeasible: total demand " + std::to_string(feasibility_.demand) + " vs supply " +
                        std::to_string(feasibility_.supply) + "; unmet demand for task";
      for (std::size_t j : feasibility_.unmet_tasks) msg += " " + tasks_[j].id + "(p=" + std::to_string(tasks_[j].max_agents) + ")";
      feasibility_.message = msg;
    }
  }

  std::vector<Region> regions_;
  std::vector<Task> tasks_;
  std::vector<Route> routes_;
  FeasibilityReport feasibility_;
};

// ---------------------------------------------------------------------------
// Weighted objective
// ---------------------------------------------------------------------------

struct WeightConfig {
  double k_t{0.5};
  double k_d{0.5};

  static WeightConfig time_weight(double k_t) { return {k_t, 1.0 - k_t}; }

  void validate() const {
    if (!(k_t >= 0.0 && k_t <= 1.0 && k_d >= 0.0 && k_d <= 1.0) || std::abs(k_t + k_d - 1.0) > 1e-9)
      throw ValidationError("weights must lie in [0,1] and sum to 1");
  }
};

struct ObjectiveBounds {
  double d_min{0.0}, d_max{0.0};
  double t_min{0.0}, t_max{0.0};
};

/// Min-max scaling to [0,1]; a degenerate range maps to 0.
inline double normalize(double value, double min, double max) {
  if (max < min) throw ValidationError("normalize: max < min");
  if (max == min) return 0.0;
  return (value - min) / (max - min);
}

struct Allocation {
  std::size_t region;
  AgentKind kind;
  std::size_t task;
  std::size_t count;
};

struct MaftAssignment {
  std::string algorithm;
  std::vector<Allocation> x;  // positive counts only
  Meters raw_distance{0.0};
  Minutes raw_time{0.0};
  double objective{0.0};  // weighted normalized value
  WeightConfig weights;
  ObjectiveBounds bounds;
  std::size_t nodes{0};
  double gap{0.0};
};

struct MaftOptions {
  lp::IlpOptions ilp;
  /// Reuse precomputed bounds (e.g. across a weight sweep).
  std::optional<ObjectiveBounds> bounds;
  /// W-Grd skips units whose commitment would leave the remaining demand uncoverable.
  /// Off gives the plain greedy, which can strand demand.
  bool greedy_lookahead{true};
};

namespace detail {

/// The transportation-shaped integer program over eligible routes.
inline lp::LinearProgram maft_program(const MaftInstance& inst, const std::vector<double>& route_cost) {
  const auto& routes = inst.routes();
  lp::LinearProgram prog(routes.size());
  prog.objective = route_cost;
  for (std::size_t i = 0; i < inst.regions().size(); ++i) {
    for (AgentKind k : kAgentKinds) {
      std::vector<double> row(routes.size(), 0.0);
      bool any = false;
      for (std::size_t r = 0; r < routes.size(); ++r)
        if (routes[r].region == i && routes[r].kind == k) {
          row[r] = 1.0;
          any = true;
        }
      if (any) prog.add(std::move(row), lp::Sense::LessEqual, static_cast<double>(inst.regions()[i].count(k)));
    }
  }
  for (std::size_t j = 0; j < inst.tasks().size(); ++j) {
    std::vector<double> row(routes.size(), 0.0);
    for (std::size_t r = 0; r < routes.size(); ++r)
      if (routes[r].task == j) row[r] = 1.0;
    prog.add(std::move(row), lp::Sense::Equal, static_cast<double>(inst.tasks()[j].max_agents));
  }
  return prog;
}

inline lp::IlpResult solve_program(const MaftInstance& inst, const std::vector<double>& route_cost,
                                   const lp::IlpOptions& options) {
  auto result = lp::branch_and_bound(maft_program(inst, route_cost), options);
  if (result.status != lp::Status::Optimal) throw InfeasibleError("AG-MAFT integer program has no solution");
  return result;
}

inline void fill_totals(const MaftInstance& inst, MaftAssignment& a) {
  a.raw_distance = 0.0;
  a.raw_time = 0.0;
  for (const auto& al : a.x) {
    const Meters d = euclidean_distance(inst.regions()[al.region].position, inst.tasks()[al.task].position);
    a.raw_distance += d * static_cast<double>(al.count);
    a.raw_time += d / inst.regions()[al.region].speed(al.kind) * static_cast<double>(al.count);
  }
  a.objective = a.weights.k_t * normalize(a.raw_time, a.bounds.t_min, std::max(a.bounds.t_min, a.bounds.t_max)) +
                a.weights.k_d * normalize(a.raw_distance, a.bounds.d_min, std::max(a.bounds.d_min, a.bounds.d_max));
}

/// Whether the residual supply (indexed 2 * region + kind) can still meet the residual demand.
inline bool coverable(const MaftInstance& inst, const std::vector<std::size_t>& supply,
                      const std::vector<std::size_t>& demand) {
  const std::size_t supplies = supply.size();
  const flow::NodeId sink = 1 + supplies + demand.size();
  flow::FlowGraph g(sink + 1, 0, sink);
  flow::Capacity need = 0;
  for (std::size_t i = 0; i < supplies; ++i)
    if (supply[i] > 0) g.add_edge(0, 1 + i, static_cast<flow::Capacity>(supply[i]), 0.0);
  for (const auto& r : inst.routes())
    if (demand[r.task] > 0) g.add_edge(1 + 2 * r.region + kind_index(r.kind), 1 + supplies + r.task, static_cast<flow::Capacity>(demand[r.task]), 0.0);
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > 0) {
      g.add_edge(1 + supplies + j, sink, static_cast<flow::Capacity>(demand[j]), 0.0);
      need += static_cast<flow::Capacity>(demand[j]);
    }
  return need == 0 || flow::min_cost_max_flow(g).total_flow == need;
}

inline std::vector<double> weighted_costs(const MaftInstance& inst, const WeightConfig& w, const ObjectiveBounds& b) {
  const double dt = b.t_max - b.t_min;
  const double dd = b.d_max - b.d_min;
  std::vector<double> c;
  c.reserve(inst.routes().size());
  for (const auto& r : inst.routes())
    c.push_back((dt > 0.0 ? w.k_t * r.time / dt : 0.0) + (dd > 0.0 ? w.k_d * r.distance / dd : 0.0));
  return c;
}

}  // namespace detail

/// Four exact single-objective solves: min/max total distance and min/max total time.
inline ObjectiveBounds objective_bounds(const MaftInstance& inst, const lp::IlpOptions& options = {}) {
  inst.require_feasible();
  std::vector<double> dist, time, neg_dist, neg_time;
  for (const auto& r : inst.routes()) {
    dist.push_back(r.distance);
    time.push_back(r.time);
    neg_dist.push_back(-r.distance);
    neg_time.push_back(-r.time);
  }
  ObjectiveBounds b;
  b.d_min = detail::solve_program(inst, dist, options).objective;
  b.d_max = -detail::solve_program(inst, neg_dist, options).objective;
  b.t_min = detail::solve_program(inst, time, options).objective;
  b.t_max = -detail::solve_program(inst, neg_time, options).objective;
  // Rounding can leave max a hair under min on degenerate instances.
  b.d_max = std::max(b.d_max, b.d_min);
  b.t_max = std::max(b.t_max, b.t_min);
  return b;
}

/// W-ILP: exact minimization of the weighted normalized time/distance objective.
inline MaftAssignment solve_w_ilp(const MaftInstance& inst, const WeightConfig& weights, const MaftOptions& options = {}) {
  weights.validate();
  inst.require_feasible();
  MaftAssignment out;
  out.algorithm = "w-ilp";
  out.weights = weights;
  out.bounds = options.bounds ? *options.bounds : objective_bounds(inst, options.ilp);
  const auto result = detail::solve_program(inst, detail::weighted_costs(inst, weights, out.bounds), options.ilp);
  for (std::size_t r = 0; r < inst.routes().size(); ++r) {
    const auto count = static_cast<std::size_t>(std::llround(result.x[r]));
    if (count == 0) continue;
    const auto& route = inst.routes()[r];
    out.x.push_back({route.region, route.kind, route.task, count});
  }
  out.nodes = result.nodes;
  out.gap = result.gap;
  detail::fill_totals(inst, out);
  return out;
}

/// W-Grd: repeatedly commits the cheapest remaining unit of weighted normalized cost.
/// Ties go to (region, kind, task) order.
inline MaftAssignment solve_w_grd(const MaftInstance& inst, const WeightConfig& weights, const MaftOptions& options = {}) {
  weights.validate();
  inst.require_feasible();
  MaftAssignment out;
  out.algorithm = "w-grd";
  out.weights = weights;
  out.bounds = options.bounds ? *options.bounds : objective_bounds(inst, options.ilp);
  const auto cost = detail::weighted_costs(inst, weights, out.bounds);
  const auto& routes = inst.routes();
  std::vector<std::size_t> order(routes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cost[a] != cost[b]) return cost[a] < cost[b];
    const auto& ra = routes[a];
    const auto& rb = routes[b];
    return std::tuple(ra.region, kind_index(ra.kind), ra.task) < std::tuple(rb.region, kind_index(rb.kind), rb.task);
  });
  // Costs are static, so taking units one at a time from the cheapest open route is the same
  // as working through routes in sorted order. A unit the lookahead rejects stays rejected:
  // later states only extend the current one.
  std::vector<std::size_t> supply(inst.regions().size() * 2);
  for (std::size_t i = 0; i < inst.regions().size(); ++i)
    for (AgentKind k : kAgentKinds) supply[2 * i + kind_index(k)] = inst.regions()[i].count(k);
  std::vector<std::size_t> demand;
  for (const auto& t : inst.tasks()) demand.push_back(t.max_agents);
  for (std::size_t r : order) {
    const auto& route = routes[r];
    auto& s = supply[2 * route.region + kind_index(route.kind)];
    auto& d = demand[route.task];
    std::size_t n = 0;
    while (s > 0 && d > 0) {
      --s;
      --d;
      if (options.greedy_lookahead && !detail::coverable(inst, supply, demand)) {
        ++s;
        ++d;
        break;
      }
      ++n;
    }
    if (n > 0) out.x.push_back({route.region, route.kind, route.task, n});
  }
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > 0)
      throw InfeasibleError("greedy allocation left task " + inst.tasks()[j].id + " short by " + std::to_string(demand[j]) +
                            " agents");
  std::sort(out.x.begin(), out.x.end(), [](const Allocation& a, const Allocation& b) {
    return std::tuple(a.region, kind_index(a.kind), a.task) < std::tuple(b.region, kind_index(b.kind), b.task);
  });
  detail::fill_totals(inst, out);
  return out;
}

/// Inventory, exact-demand, integrality and eligibility checks. Empty when valid.
inline std::vector<std::string> maft_violations(const MaftInstance& inst, const MaftAssignment& a) {
  std::vector<std::string> v;
  std::vector<std::size_t> used(inst.regions().size() * 2, 0);
  std::vector<std::size_t> got(inst.tasks().size(), 0);
  for (const auto& al : a.x) {
    if (al.region >= inst.regions().size() || al.task >= inst.tasks().size()) {
      v.push_back("allocation references a missing region or task");
      continue;
    }
    if (al.count > 0 && !inst.eligible(al.region, al.kind, al.task))
      v.push_back("ineligible " + std::string(to_string(al.kind)) + " from region " + inst.regions()[al.region].id +
                  " on task " + inst.tasks()[al.task].id);
    used[2 * al.region + kind_index(al.kind)] += al.count;
    got[al.task] += al.count;
  }
  for (std::size_t i = 0; i < inst.regions().size(); ++i)
    for (AgentKind k : kAgentKinds)
      if (used[2 * i + kind_index(k)] > inst.regions()[i].count(k))
        v.push_back("region " + inst.regions()[i].id + " sends more " + to_string(k) + "s than it holds");
  for (std::size_t j = 0; j < inst.tasks().size(); ++j)
    if (got[j] != inst.tasks()[j].max_agents)
      v.push_back("task " + inst.tasks()[j].id + " receives " + std::to_string(got[j]) + " agents, demand " +
                  std::to_string(inst.tasks()[j].max_agents));
  return v;
}

// ---------------------------------------------------------------------------
// Weight sweep
// ---------------------------------------------------------------------------

struct ParetoPoint {
  double k_t{0.0};
  double k_d{0.0};
  Minutes time{0.0};
  Meters distance{0.0};
  double objective{0.0};
  bool pareto{false};
  std::string error;  // non-empty when the solve failed
};

/// Flags the mutually non-dominated (time, distance) pairs among successful points.
inline void flag_pareto(std::vector<ParetoPoint>& points) {
  auto tol = [](double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); };
  for (auto& p : points) {
    p.pareto = false;
    if (!p.error.empty()) continue;
    bool dominated = false;
    for (const auto& o : points) {
      if (&o == &p || !o.error.empty()) continue;
      const bool no_worse = o.time <= p.time + tol(o.time, p.time) && o.distance <= p.distance + tol(o.distance, p.distance);
      const bool better = o.time < p.time - tol(o.time, p.time) || o.distance < p.distance - tol(o.distance, p.distance);
      if (no_worse && better) {
        dominated = true;
        break;
      }
    }
    p.pareto = !dominated;
  }
}

inline std::vector<ParetoPoint> pareto_sweep(const MaftInstance& inst, std::span<const double> time_weights,
                                             const MaftOptions& options = {}) {
  std::vector<ParetoPoint> points;
  MaftOptions opts = options;
  if (!opts.bounds) {
    try {
      opts.bounds = objective_bounds(inst, options.ilp);
    } catch (const std::exception& e) {
      for (double kt : time_weights) points.push_back({kt, 1.0 - kt, 0.0, 0.0, 0.0, false, e.what()});
      return points;
    }
  }
  for (double kt : time_weights) {
    ParetoPoint p{kt, 1.0 - kt, 0.0, 0.0, 0.0, false, {}};
    try {
      const auto a = solve_w_ilp(inst, WeightConfig::time_weight(kt), opts);
      p.time = a.raw_time;
      p.distance = a.raw_distance;
      p.objective = a.objective;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    points.push_back(std::move(p));
  }
  flag_pareto(points);
  return points;
}

}  // namespace agco
