#pragma once

#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "agco/mcmf.hpp"
#include "agco/model.hpp"
#include "agco/tour.hpp"

namespace agco {

/// How the travel distance of an agent's task set is measured.
enum class DistanceSemantics {
  Path,  // chained visiting order, start -> t1 -> t2 -> ...
  Star,  // independent start -> ti legs
};

inline const char* to_string(DistanceSemantics s) { return s == DistanceSemantics::Path ? "path" : "star"; }

struct InstanceTooLarge : Error {
  using Error::Error;
};

struct FamtOptions {
  std::uint64_t enumeration_cap = 200'000;
  DistanceSemantics semantics = DistanceSemantics::Path;
  bool count_guard = true;
  std::size_t guard_state_limit = 200'000;
};

struct TaskSet {
  std::vector<std::size_t> members;      // task indices, ascending
  std::vector<std::size_t> visit_order;  // task indices in travel order
  Meters cost{0.0};
};

struct AgentPlan {
  std::string agent_id;
  std::vector<std::size_t> tasks;  // task indices in visiting order; empty when unassigned
  Meters distance{0.0};
};

struct FamtAssignment {
  std::string algorithm;
  std::vector<AgentPlan> plans;  // one per agent, scenario order
  std::size_t tasks_completed{0};
  Meters total_distance{0.0};
  /// Completed-task count proven maximal (only MT-MCMF with the count guard sets this).
  bool count_certified{false};
};

/// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i; cancel the common factor first.
    const std::uint64_t g = std::gcd(r, i);
    const std::uint64_t factor = (n - k + i) / (i / g);
    r /= g;
    if (r > std::numeric_limits<std::uint64_t>::max() / factor) return std::numeric_limits<std::uint64_t>::max();
    r *= factor;
  }
  return r;
}

inline Meters plan_distance(const FamtScenario& s, const Agent& agent, const std::vector<std::size_t>& visit_order,
                            DistanceSemantics semantics) {
  std::vector<Position> stops;
  stops.reserve(visit_order.size());
  for (std::size_t t : visit_order) stops.push_back(s.tasks[t].position);
  if (semantics == DistanceSemantics::Star) return star_length(agent.position, stops);
  std::vector<std::size_t> identity(stops.size());
  std::iota(identity.begin(), identity.end(), 0);
  return open_path_length(agent.position, stops, identity);
}

/// Every q-combination of tasks the agent can finish within its travel budget, in
/// lexicographic member order, each costed by its shortest visiting path.
inline std::vector<TaskSet> enumerate_feasible_sets(const FamtScenario& s, const Agent& agent,
                                                    const FamtOptions& options = {}) {
  const std::size_t n = s.tasks.size();
  const std::size_t q = agent.task_limit;
  std::vector<TaskSet> sets;
  if (q == 0 || q > n) return sets;
  const std::uint64_t count = binomial(n, q);
  if (count > options.enumeration_cap)
    throw InstanceTooLarge("instance too large: C(" + std::to_string(n) + "," + std::to_string(q) +
                           ") = " + std::to_string(count) + " task sets exceeds the enumeration cap of " +
                           std::to_string(options.enumeration_cap));

  std::vector<std::size_t> combo(q);
  std::iota(combo.begin(), combo.end(), 0);
  std::vector<Position> stops(q);
  while (true) {
    for (std::size_t i = 0; i < q; ++i) stops[i] = s.tasks[combo[i]].position;
    TaskSet set;
    set.members = combo;
    if (options.semantics == DistanceSemantics::Path) {
      const Tour tour = shortest_open_path(agent.position, stops);
      set.cost = tour.length;
      for (std::size_t i : tour.order) set.visit_order.push_back(combo[i]);
    } else {
      set.cost = star_length(agent.position, stops);
      set.visit_order = combo;
    }
    if (set.cost <= agent.max_travel) sets.push_back(std::move(set));

    // next combination
    std::size_t i = q;
    while (i > 0 && combo[i - 1] == n - q + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < q; ++j) combo[j] = combo[j - 1] + 1;
  }
  return sets;
}

/// Layered network source -> agents -> task sets -> tasks -> sink.
struct FamtNetwork {
  flow::FlowGraph graph{2, 0, 1};
  std::vector<flow::NodeId> agent_nodes;
  std::vector<flow::NodeId> set_nodes;
  std::vector<flow::NodeId> task_nodes;
  std::vector<std::vector<std::size_t>> set_members;  // per set node
  std::vector<std::vector<TaskSet>> agent_sets;        // per agent, feasible sets
  /// agent -> set edge id -> (agent, index into agent_sets[agent])
  std::map<flow::EdgeId, std::pair<std::size_t, std::size_t>> selection_edges;
};

inline FamtNetwork build_famt_network(const FamtScenario& s, const FamtOptions& options = {}) {
  FamtNetwork net;
  const std::size_t m = s.agents.size();
  const std::size_t n = s.tasks.size();
  net.agent_sets.reserve(m);
  for (const auto& agent : s.agents) net.agent_sets.push_back(enumerate_feasible_sets(s, agent, options));

  std::map<std::vector<std::size_t>, std::size_t> set_index;
  for (const auto& sets : net.agent_sets)
    for (const auto& set : sets)
      if (set_index.emplace(set.members, net.set_members.size()).second) net.set_members.push_back(set.members);

  const flow::NodeId source = 0;
  const std::size_t first_agent = 1;
  const std::size_t first_set = first_agent + m;
  const std::size_t first_task = first_set + net.set_members.size();
  const flow::NodeId sink = first_task + n;
  net.graph = flow::FlowGraph(sink + 1, source, sink);

  for (std::size_t a = 0; a < m; ++a) {
    net.agent_nodes.push_back(first_agent + a);
    net.graph.add_edge(source, first_agent + a, static_cast<flow::Capacity>(s.agents[a].task_limit), 0.0);
  }
  for (std::size_t k = 0; k < net.set_members.size(); ++k) net.set_nodes.push_back(first_set + k);
  for (std::size_t t = 0; t < n; ++t) net.task_nodes.push_back(first_task + t);

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t i = 0; i < net.agent_sets[a].size(); ++i) {
      const auto& set = net.agent_sets[a][i];
      const std::size_t k = set_index.at(set.members);
      const flow::EdgeId e = net.graph.add_edge(first_agent + a, first_set + k,
                                                static_cast<flow::Capacity>(s.agents[a].task_limit), set.cost);
      net.selection_edges.emplace(e, std::make_pair(a, i));
    }
  }
  for (std::size_t k = 0; k < net.set_members.size(); ++k)
    for (std::size_t t : net.set_members[k])
      net.graph.add_edge(first_set + k, first_task + t, static_cast<flow::Capacity>(std::max<std::size_t>(m, 1)), 0.0);
  for (std::size_t t = 0; t < n; ++t)
    net.graph.add_edge(first_task + t, sink, static_cast<flow::Capacity>(s.tasks[t].max_agents), 0.0);
  return net;
}

inline FamtAssignment make_empty_assignment(const FamtScenario& s, std::string algorithm) {
  FamtAssignment out;
  out.algorithm = std::move(algorithm);
  for (const auto& agent : s.agents) out.plans.push_back({agent.id, {}, 0.0});
  return out;
}

/// MT-MCMF: cheapest-feasible (agent, task set) selection over the layered network.
inline FamtAssignment solve_mt_mcmf(const FamtScenario& s, const FamtOptions& options = {}) {
  validate(s);
  FamtAssignment out = make_empty_assignment(s, "mt-mcmf");
  if (s.agents.empty() || s.tasks.empty()) {
    out.count_certified = true;
    return out;
  }
  const FamtNetwork net = build_famt_network(s, options);
  const auto selection = flow::chunked_min_cost_selection(
      net.graph, net.agent_nodes, net.set_nodes, {options.count_guard, options.guard_state_limit});
  for (const auto& pick : selection.picks) {
    const auto [a, i] = net.selection_edges.at(pick.edge);
    const TaskSet& set = net.agent_sets[a][i];
    out.plans[a].tasks = set.visit_order;
    out.plans[a].distance = set.cost;
  }
  for (const auto& plan : out.plans) {
    out.tasks_completed += plan.tasks.size();
    out.total_distance += plan.distance;
  }
  out.count_certified = selection.count_certified;
  return out;
}

/// MT-GrdPT: agents in scenario order repeatedly move to the nearest task that still has
/// room for another agent, until they hold q tasks. An agent that cannot complete q tasks
/// within its travel budget releases what it took and stays unassigned.
inline FamtAssignment solve_greedy_pt(const FamtScenario& s, const FamtOptions& options = {}) {
  validate(s);
  FamtAssignment out = make_empty_assignment(s, "mt-grdpt");
  std::vector<std::size_t> load(s.tasks.size(), 0);
  for (std::size_t a = 0; a < s.agents.size(); ++a) {
    const Agent& agent = s.agents[a];
    std::vector<std::size_t> taken;
    std::vector<bool> mine(s.tasks.size(), false);
    Position at = agent.position;
    Meters travelled = 0.0;
    bool ok = true;
    while (taken.size() < agent.task_limit) {
      std::size_t best = s.tasks.size();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < s.tasks.size(); ++t) {
        if (mine[t] || load[t] >= s.tasks[t].max_agents) continue;
        const double d = euclidean_distance(at, s.tasks[t].position);
        if (d < best_d) {
          best_d = d;
          best = t;
        }
      }
      if (best == s.tasks.size() || travelled + best_d > agent.max_travel) {
        ok = false;
        break;
      }
      travelled += best_d;
      at = s.tasks[best].position;
      mine[best] = true;
      taken.push_back(best);
      ++load[best];
    }
    if (!ok) {
      for (std::size_t t : taken) --load[t];
      continue;
    }
    const Meters d = plan_distance(s, agent, taken, options.semantics);
    if (d > agent.max_travel) {
      for (std::size_t t : taken) --load[t];
      continue;
    }
    out.plans[a].tasks = std::move(taken);
    out.plans[a].distance = d;
  }
  for (const auto& plan : out.plans) {
    out.tasks_completed += plan.tasks.size();
    out.total_distance += plan.distance;
  }
  return out;
}

/// Violations of the per-agent count, per-task cap, and travel budget constraints, plus
/// bookkeeping consistency. Empty when the assignment is valid.
inline std::vector<std::string> famt_violations(const FamtScenario& s, const FamtAssignment& a,
                                                DistanceSemantics semantics = DistanceSemantics::Path) {
  std::vector<std::string> v;
  if (a.plans.size() != s.agents.size()) {
    v.push_back("plan count does not match agent count");
    return v;
  }
  std::vector<std::size_t> load(s.tasks.size(), 0);
  std::size_t completed = 0;
  Meters total = 0.0;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const Agent& agent = s.agents[i];
    const AgentPlan& plan = a.plans[i];
    if (plan.agent_id != agent.id) v.push_back("plan " + std::to_string(i) + " names the wrong agent");
    if (!plan.tasks.empty() && plan.tasks.size() != agent.task_limit)
      v.push_back("agent " + agent.id + " holds " + std::to_string(plan.tasks.size()) + " tasks, expected " +
                  std::to_string(agent.task_limit));
    std::vector<std::size_t> sorted = plan.tasks;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      v.push_back("agent " + agent.id + " repeats a task");
    bool in_range = true;
    for (std::size_t t : plan.tasks) {
      if (t >= s.tasks.size()) {
        v.push_back("agent " + agent.id + " references task index " + std::to_string(t));
        in_range = false;
        continue;
      }
      ++load[t];
    }
    if (!in_range) continue;
    const Meters d = plan_distance(s, agent, plan.tasks, semantics);
    if (!detail::nearly_equal(d, plan.distance))
      v.push_back("agent " + agent.id + " reports distance " + std::to_string(plan.distance) + " but its route is " +
                  std::to_string(d));
    if (d > agent.max_travel * (1.0 + 1e-12))
      v.push_back("agent " + agent.id + " travels " + std::to_string(d) + " beyond its budget " +
                  std::to_string(agent.max_travel));
    completed += plan.tasks.size();
    total += plan.distance;
  }
  for (std::size_t t = 0; t < s.tasks.size(); ++t)
    if (load[t] > s.tasks[t].max_agents)
      v.push_back("task " + s.tasks[t].id + " assigned to " + std::to_string(load[t]) + " agents, cap " +
                  std::to_string(s.tasks[t].max_agents));
  if (completed != a.tasks_completed) v.push_back("tasks_completed total is inconsistent");
  if (!detail::nearly_equal(total, a.total_distance)) v.push_back("total_distance is inconsistent");
  return v;
}

}  // namespace agco
