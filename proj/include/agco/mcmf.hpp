#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "agco/model.hpp"

namespace agco::flow {

using NodeId = std::size_t;
using EdgeId = std::size_t;
using Capacity = std::int64_t;

struct GraphError : Error {
  using Error::Error;
};

struct FlowEdge {
  NodeId from;
  NodeId to;
  Capacity capacity;
  double cost;
};

/// Directed graph with integer capacities and non-negative per-unit costs.
class FlowGraph {
 public:
  FlowGraph(std::size_t node_count, NodeId source, NodeId sink)
      : node_count_(node_count), source_(source), sink_(sink) {
    if (source >= node_count || sink >= node_count)
      throw GraphError("source/sink outside node range");
    if (source == sink) throw GraphError("source and sink must differ");
  }

  EdgeId add_edge(NodeId from, NodeId to, Capacity capacity, double cost) {
    if (from >= node_count_ || to >= node_count_)
      throw GraphError("edge " + std::to_string(from) + "->" + std::to_string(to) + " references a missing node");
    if (from == to) throw GraphError("self-loop on node " + std::to_string(from));
    if (capacity < 0) throw GraphError("negative capacity");
    if (!(cost >= 0.0) || !std::isfinite(cost)) throw GraphError("edge cost must be finite and non-negative");
    edges_.push_back({from, to, capacity, cost});
    return edges_.size() - 1;
  }

  std::size_t node_count() const { return node_count_; }
  NodeId source() const { return source_; }
  NodeId sink() const { return sink_; }
  const std::vector<FlowEdge>& edges() const { return edges_; }
  const FlowEdge& edge(EdgeId e) const { return edges_.at(e); }

 private:
  std::size_t node_count_;
  NodeId source_;
  NodeId sink_;
  std::vector<FlowEdge> edges_;
};

struct FlowResult {
  Capacity total_flow{0};
  double total_cost{0.0};
  std::vector<Capacity> edge_flow;  // indexed by EdgeId
};

/// Net inflow minus outflow per node.
inline std::vector<Capacity> node_excess(const FlowGraph& g, const FlowResult& r) {
  std::vector<Capacity> excess(g.node_count(), 0);
  for (EdgeId e = 0; e < g.edges().size(); ++e) {
    excess[g.edges()[e].to] += r.edge_flow[e];
    excess[g.edges()[e].from] -= r.edge_flow[e];
  }
  return excess;
}

/// Checks capacity bounds and conservation at every interior node.
inline bool is_valid_flow(const FlowGraph& g, const FlowResult& r) {
  if (r.edge_flow.size() != g.edges().size()) return false;
  for (EdgeId e = 0; e < g.edges().size(); ++e)
    if (r.edge_flow[e] < 0 || r.edge_flow[e] > g.edges()[e].capacity) return false;
  const auto excess = node_excess(g, r);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (v == g.source() || v == g.sink()) continue;
    if (excess[v] != 0) return false;
  }
  return excess[g.sink()] == r.total_flow && excess[g.source()] == -r.total_flow;
}

inline double flow_cost(const FlowGraph& g, const FlowResult& r) {
  double c = 0.0;
  for (EdgeId e = 0; e < g.edges().size(); ++e) c += static_cast<double>(r.edge_flow[e]) * g.edges()[e].cost;
  return c;
}

/// Successive shortest augmenting paths (Dijkstra on reduced costs with node potentials).
inline FlowResult min_cost_max_flow(const FlowGraph& g) {
  struct Arc {
    NodeId to;
    Capacity residual;
    double cost;
  };
  const std::size_t n = g.node_count();
  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> out(n);
  arcs.reserve(g.edges().size() * 2);
  for (const auto& e : g.edges()) {
    out[e.from].push_back(arcs.size());
    arcs.push_back({e.to, e.capacity, e.cost});
    out[e.to].push_back(arcs.size());
    arcs.push_back({e.from, 0, -e.cost});
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> potential(n, 0.0);
  std::vector<double> dist(n);
  std::vector<std::size_t> via(n);
  FlowResult result;

  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(via.begin(), via.end(), SIZE_MAX);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[g.source()] = 0.0;
    heap.push({0.0, g.source()});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (std::size_t a : out[u]) {
        const Arc& arc = arcs[a];
        if (arc.residual <= 0) continue;
        // Reduced costs are non-negative up to rounding.
        const double reduced = std::max(0.0, arc.cost + potential[u] - potential[arc.to]);
        const double nd = d + reduced;
        if (nd < dist[arc.to] - 1e-12) {
          dist[arc.to] = nd;
          via[arc.to] = a;
          heap.push({nd, arc.to});
        }
      }
    }
    if (dist[g.sink()] == kInf) break;
    for (NodeId v = 0; v < n; ++v)
      if (dist[v] < kInf) potential[v] += dist[v];

    Capacity push = std::numeric_limits<Capacity>::max();
    for (NodeId v = g.sink(); v != g.source(); v = arcs[via[v] ^ 1].to) push = std::min(push, arcs[via[v]].residual);
    for (NodeId v = g.sink(); v != g.source(); v = arcs[via[v] ^ 1].to) {
      arcs[via[v]].residual -= push;
      arcs[via[v] ^ 1].residual += push;
    }
    result.total_flow += push;
  }

  result.edge_flow.resize(g.edges().size());
  for (EdgeId e = 0; e < g.edges().size(); ++e) result.edge_flow[e] = arcs[2 * e + 1].residual;
  result.total_cost = flow_cost(g, result);
  return result;
}

// ---------------------------------------------------------------------------
// Chunked selection on the layered source -> agents -> task sets -> tasks -> sink network
// ---------------------------------------------------------------------------

struct ShapeError : GraphError {
  using GraphError::GraphError;
};

struct ChunkedOptions {
  /// Only accept a pair if the remaining agents can still reach the maximum completed-task count.
  bool count_guard = true;
  /// Search-state budget for the guard; when exhausted the selection falls back to plain cheapest-pair.
  std::size_t guard_state_limit = 200'000;
};

struct ChunkPick {
  std::size_t agent;  // index into agent_nodes
  std::size_t set;    // index into set_nodes
  EdgeId edge;        // agent -> set edge
};

struct ChunkedSelection {
  FlowResult flow;
  std::vector<ChunkPick> picks;  // in selection order
  /// True when the completed-task count is proven maximal for the network.
  bool count_certified{false};
};

namespace detail {

class LayeredView {
 public:
  LayeredView(const FlowGraph& g, std::span<const NodeId> agent_nodes, std::span<const NodeId> set_nodes)
      : g_(g), agent_nodes_(agent_nodes.begin(), agent_nodes.end()), set_nodes_(set_nodes.begin(), set_nodes.end()) {
    const std::size_t n = g.node_count();
    std::vector<int> role(n, kOther);
    role[g.source()] = kSource;
    role[g.sink()] = kSink;
    std::vector<std::size_t> index(n, SIZE_MAX);
    for (std::size_t a = 0; a < agent_nodes_.size(); ++a) {
      const NodeId v = agent_nodes_[a];
      if (v >= n || role[v] != kOther) throw ShapeError("agent node " + std::to_string(v) + " invalid or duplicated");
      role[v] = kAgent;
      index[v] = a;
    }
    for (std::size_t s = 0; s < set_nodes_.size(); ++s) {
      const NodeId v = set_nodes_[s];
      if (v >= n || role[v] != kOther) throw ShapeError("set node " + std::to_string(v) + " invalid or duplicated");
      role[v] = kSet;
      index[v] = s;
    }

    agent_q_.assign(agent_nodes_.size(), -1);
    source_edge_.assign(agent_nodes_.size(), SIZE_MAX);
    set_members_.assign(set_nodes_.size(), {});
    set_task_edges_.assign(set_nodes_.size(), {});
    candidates_.assign(agent_nodes_.size(), {});
    selection_edge_.assign(g.edges().size(), false);
    std::vector<std::size_t> task_of_node(n, SIZE_MAX);
    auto task_index = [&](NodeId v) {
      if (task_of_node[v] == SIZE_MAX) {
        task_of_node[v] = task_nodes_.size();
        task_nodes_.push_back(v);
        sink_edge_.push_back(SIZE_MAX);
      }
      return task_of_node[v];
    };

    for (EdgeId e = 0; e < g.edges().size(); ++e) {
      const auto& edge = g.edges()[e];
      const int rf = role[edge.from];
      const int rt = role[edge.to];
      if (rf == kSource && rt == kAgent) {
        const std::size_t a = index[edge.to];
        if (source_edge_[a] != SIZE_MAX) throw ShapeError("agent node has multiple source edges");
        source_edge_[a] = e;
        agent_q_[a] = edge.capacity;
      } else if (rf == kAgent && rt == kSet) {
        candidates_[index[edge.from]].push_back({index[edge.to], e});
        selection_edge_[e] = true;
      } else if (rf == kSet && rt == kOther) {
        const std::size_t s = index[edge.from];
        set_members_[s].push_back(task_index(edge.to));
        set_task_edges_[s].push_back(e);
      } else if (rf == kOther && rt == kSink) {
        const std::size_t t = task_index(edge.from);
        if (sink_edge_[t] != SIZE_MAX) throw ShapeError("task node has multiple sink edges");
        sink_edge_[t] = e;
      } else {
        throw ShapeError("edge " + std::to_string(edge.from) + "->" + std::to_string(edge.to) +
                         " does not fit the layered network shape");
      }
    }
    for (std::size_t a = 0; a < agent_nodes_.size(); ++a)
      if (source_edge_[a] == SIZE_MAX) throw ShapeError("agent node without source edge");
    for (std::size_t t = 0; t < task_nodes_.size(); ++t)
      if (sink_edge_[t] == SIZE_MAX) throw ShapeError("task node without sink edge");

    set_key_.resize(set_nodes_.size());
    for (std::size_t s = 0; s < set_nodes_.size(); ++s) {
      for (std::size_t t : set_members_[s]) set_key_[s].push_back(task_nodes_[t]);
      std::sort(set_key_[s].begin(), set_key_[s].end());
      if (std::adjacent_find(set_key_[s].begin(), set_key_[s].end()) != set_key_[s].end())
        throw ShapeError("task set with repeated member");
    }
    for (std::size_t a = 0; a < agent_nodes_.size(); ++a) {
      for (const auto& c : candidates_[a])
        if (static_cast<Capacity>(set_members_[c.set].size()) != agent_q_[a])
          throw ShapeError("task set size does not match the agent's source capacity");
      std::sort(candidates_[a].begin(), candidates_[a].end(), [&](const Candidate& x, const Candidate& y) {
        const double cx = g_.edge(x.edge).cost;
        const double cy = g_.edge(y.edge).cost;
        if (cx != cy) return cx < cy;
        return set_key_[x.set] < set_key_[y.set];
      });
    }
  }

  struct Candidate {
    std::size_t set;
    EdgeId edge;
  };

  const FlowGraph& g_;
  std::vector<NodeId> agent_nodes_;
  std::vector<NodeId> set_nodes_;
  std::vector<NodeId> task_nodes_;
  std::vector<EdgeId> sink_edge_;
  std::vector<Capacity> agent_q_;
  std::vector<EdgeId> source_edge_;
  std::vector<std::vector<std::size_t>> set_members_;
  std::vector<std::vector<EdgeId>> set_task_edges_;
  std::vector<std::vector<NodeId>> set_key_;
  std::vector<std::vector<Candidate>> candidates_;
  std::vector<bool> selection_edge_;  // agent -> set

 private:
  static constexpr int kOther = 0, kSource = 1, kSink = 2, kAgent = 3, kSet = 4;
};

struct GuardExhausted {};

/// Bounded exhaustive check: can `agents` jointly complete at least `need` task-units?
class CountGuard {
 public:
  CountGuard(const LayeredView& view, std::size_t state_limit) : view_(view), state_limit_(state_limit) {}

  bool can_achieve(const std::vector<std::size_t>& agents, std::vector<Capacity>& residual, Capacity need) {
    failed_.clear();
    states_ = 0;
    return search(agents, 0, residual, need);
  }

 private:
  bool feasible(std::size_t set, const std::vector<Capacity>& residual) const {
    for (std::size_t t : view_.set_members_[set])
      if (residual[t] < 1) return false;
    return true;
  }

  bool search(const std::vector<std::size_t>& agents, std::size_t i, std::vector<Capacity>& residual,
              Capacity need) {
    if (need <= 0) return true;
    Capacity upper = 0;
    for (std::size_t j = i; j < agents.size(); ++j) upper += view_.agent_q_[agents[j]];
    if (upper < need) return false;
    if (++states_ > state_limit_) throw GuardExhausted{};

    std::string key;
    key.reserve(16 + residual.size() * sizeof(Capacity));
    key.append(reinterpret_cast<const char*>(&i), sizeof i);
    key.append(reinterpret_cast<const char*>(&need), sizeof need);
    key.append(reinterpret_cast<const char*>(residual.data()), residual.size() * sizeof(Capacity));
    if (failed_.contains(key)) return false;

    const std::size_t a = agents[i];
    for (const auto& c : view_.candidates_[a]) {
      if (!feasible(c.set, residual)) continue;
      for (std::size_t t : view_.set_members_[c.set]) --residual[t];
      const bool ok = search(agents, i + 1, residual, need - view_.agent_q_[a]);
      for (std::size_t t : view_.set_members_[c.set]) ++residual[t];
      if (ok) return true;
    }
    if (upper - view_.agent_q_[a] >= need && search(agents, i + 1, residual, need)) return true;
    failed_.insert(std::move(key));
    return false;
  }

  const LayeredView& view_;
  std::size_t state_limit_;
  std::size_t states_{0};
  std::unordered_set<std::string> failed_;
};

}  // namespace detail

/// All-or-nothing selection of (agent, task set) pairs, cheapest feasible pair first.
///
/// Each agent node is fed by one source edge whose capacity is the agent's chunk q; agent -> set
/// edge costs are per-selection charges (the tour length of the whole set), so a selected pair
/// contributes its edge cost once while carrying q units. A pair is feasible while the agent is
/// unassigned and every member task keeps at least one unit of residual sink capacity. Ties are
/// broken by agent order, then by the lexicographically smallest member list.
inline ChunkedSelection chunked_min_cost_selection(const FlowGraph& g, std::span<const NodeId> agent_nodes,
                                                   std::span<const NodeId> set_nodes,
                                                   const ChunkedOptions& options = {}) {
  const detail::LayeredView view(g, agent_nodes, set_nodes);
  const std::size_t num_agents = view.agent_nodes_.size();

  std::vector<Capacity> residual(view.task_nodes_.size());
  for (std::size_t t = 0; t < residual.size(); ++t) residual[t] = g.edge(view.sink_edge_[t]).capacity;
  std::vector<bool> assigned(num_agents, false);
  std::vector<std::size_t> cursor(num_agents, 0);

  auto feasible = [&](std::size_t set) {
    for (std::size_t t : view.set_members_[set])
      if (residual[t] < 1) return false;
    return true;
  };

  ChunkedSelection out;
  out.flow.edge_flow.assign(g.edges().size(), 0);

  bool guard_on = options.count_guard;
  bool certified = options.count_guard;
  detail::CountGuard guard(view, options.guard_state_limit);
  Capacity target = 0;
  Capacity completed = 0;
  if (guard_on) {
    std::vector<std::size_t> all(num_agents);
    for (std::size_t a = 0; a < num_agents; ++a) all[a] = a;
    Capacity upper = 0;
    for (std::size_t a = 0; a < num_agents; ++a)
      if (!view.candidates_[a].empty()) upper += view.agent_q_[a];
    try {
      // Sum of a subset of agent chunk sizes; scan downward for the largest achievable one.
      for (target = upper; target > 0; --target)
        if (guard.can_achieve(all, residual, target)) break;
    } catch (const detail::GuardExhausted&) {
      guard_on = false;
      certified = false;
    }
  }

  auto guard_accepts = [&](std::size_t agent, std::size_t set) {
    if (!guard_on) return true;
    std::vector<std::size_t> rest;
    for (std::size_t a = 0; a < num_agents; ++a)
      if (!assigned[a] && a != agent) rest.push_back(a);
    for (std::size_t t : view.set_members_[set]) --residual[t];
    bool ok = true;
    try {
      ok = guard.can_achieve(rest, residual, target - completed - view.agent_q_[agent]);
    } catch (const detail::GuardExhausted&) {
      guard_on = false;
      certified = false;
    }
    for (std::size_t t : view.set_members_[set]) ++residual[t];
    return ok;
  };

  while (true) {
    bool found = false;
    std::size_t best_agent = 0;
    std::size_t best_pos = 0;
    for (std::size_t a = 0; a < num_agents; ++a) {
      if (assigned[a]) continue;
      const auto& cands = view.candidates_[a];
      // Feasibility only shrinks, so infeasible prefixes can be skipped permanently.
      while (cursor[a] < cands.size() && !feasible(cands[cursor[a]].set)) ++cursor[a];
      for (std::size_t pos = cursor[a]; pos < cands.size(); ++pos) {
        if (!feasible(cands[pos].set)) continue;
        if (found) {
          const double cur = g.edge(cands[pos].edge).cost;
          const double best = g.edge(view.candidates_[best_agent][best_pos].edge).cost;
          // Candidates are sorted per agent; nothing later in this list can win.
          if (cur > best) break;
          if (cur == best) break;  // equal cost: the earlier agent keeps priority
        }
        if (!guard_accepts(a, cands[pos].set)) continue;
        found = true;
        best_agent = a;
        best_pos = pos;
        break;
      }
    }
    if (!found) break;

    const auto& pick = view.candidates_[best_agent][best_pos];
    const Capacity q = view.agent_q_[best_agent];
    assigned[best_agent] = true;
    completed += q;
    out.flow.edge_flow[view.source_edge_[best_agent]] += q;
    out.flow.edge_flow[pick.edge] += q;
    for (std::size_t k = 0; k < view.set_members_[pick.set].size(); ++k) {
      const std::size_t t = view.set_members_[pick.set][k];
      out.flow.edge_flow[view.set_task_edges_[pick.set][k]] += 1;
      out.flow.edge_flow[view.sink_edge_[t]] += 1;
      --residual[t];
    }
    out.flow.total_flow += q;
    out.flow.total_cost += g.edge(pick.edge).cost;
    out.picks.push_back({best_agent, pick.set, pick.edge});
  }

  // Costs on the non-set layers are ordinary per-unit costs.
  for (EdgeId e = 0; e < g.edges().size(); ++e) {
    if (!view.selection_edge_[e]) out.flow.total_cost += static_cast<double>(out.flow.edge_flow[e]) * g.edges()[e].cost;
  }
  out.count_certified = certified;
  return out;
}

/// Graphviz dump of a flow network, optionally annotated with a flow.
inline std::string to_dot(const FlowGraph& g, const FlowResult* flow = nullptr) {
  std::ostringstream os;
  os << "digraph flow {\n  rankdir=LR;\n";
  os << "  n" << g.source() << " [label=\"source\", shape=box];\n";
  os << "  n" << g.sink() << " [label=\"sink\", shape=box];\n";
  for (EdgeId e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edges()[e];
    os << "  n" << edge.from << " -> n" << edge.to << " [label=\"";
    if (flow) os << flow->edge_flow[e] << "/";
    os << edge.capacity << " @" << edge.cost << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace agco::flow
