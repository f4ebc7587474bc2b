#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "agco/charging.hpp"
#include "agco/famt.hpp"
#include "agco/io.hpp"
#include "agco/maft.hpp"
#include "agco/scenario.hpp"

namespace agco::bench {

using json = nlohmann::json;

enum class Family { VaryTasks, VaryAgents, VaryQ, VaryDistribution, WeightSweep, Charging };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::VaryTasks: return "vary_tasks";
    case Family::VaryAgents: return "vary_agents";
    case Family::VaryQ: return "vary_q";
    case Family::VaryDistribution: return "vary_distribution";
    case Family::WeightSweep: return "weight_sweep";
    case Family::Charging: return "charging";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  for (Family f : {Family::VaryTasks, Family::VaryAgents, Family::VaryQ, Family::VaryDistribution, Family::WeightSweep,
                   Family::Charging})
    if (s == to_string(f)) return f;
  throw ValidationError("unknown experiment family '" + s + "'");
}

/// Name of the swept parameter.
inline const char* parameter_name(Family f) {
  switch (f) {
    case Family::VaryTasks: return "N";
    case Family::VaryAgents: return "M";
    case Family::VaryQ: return "q";
    case Family::VaryDistribution: return "distribution";
    case Family::WeightSweep: return "k_t";
    case Family::Charging: return "uavs_per_ugv";
  }
  return "?";
}

inline std::vector<std::string> valid_algorithms(Family f) {
  switch (f) {
    case Family::WeightSweep: return {"w-ilp", "w-grd"};
    case Family::Charging: return {"pctp", "static"};
    default: return {"mt-mcmf", "mt-grdpt"};
  }
}

struct ExperimentSpec {
  Family family{Family::VaryTasks};
  /// Swept values; distributions are encoded as 0 compact, 1 scattered, 2 hybrid.
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> algorithms;
  GenConfig base;
  ChargingGenConfig charging;
  std::size_t charging_regions{4};
  Meters charging_region_size{500.0};
  SimOptions sim;
  FamtOptions famt;
  lp::IlpOptions ilp;
  bool default_grid{true};
  std::string output;
};

inline Distribution grid_distribution(double v) {
  switch (static_cast<int>(v)) {
    case 0: return Distribution::Compact;
    case 1: return Distribution::Scattered;
    case 2: return Distribution::Hybrid;
  }
  throw ValidationError("distribution grid values must be 0, 1 or 2");
}

inline std::string grid_label(Family f, double v) {
  if (f == Family::VaryDistribution) return agco::to_string(grid_distribution(v));
  return io::format_number(v);
}

/// M = 4, q = 3 and N = 20 unless swept.
inline ExperimentSpec default_spec(Family f, std::size_t seed_count = 20) {
  ExperimentSpec s;
  s.family = f;
  s.algorithms = valid_algorithms(f);
  for (std::uint64_t i = 0; i < seed_count; ++i) s.seeds.push_back(i);
  s.base.num_agents = 4;
  s.base.num_tasks = 20;
  s.base.q = QPolicy::fixed(3);
  switch (f) {
    case Family::VaryTasks: s.grid = {10, 15, 20, 25, 30}; break;
    case Family::VaryAgents: s.grid = {3, 4, 5, 6, 7, 8, 9, 10, 11}; break;
    case Family::VaryQ: s.grid = {2, 3, 4, 5}; break;
    case Family::VaryDistribution: s.grid = {0, 2, 1}; break;
    case Family::WeightSweep:
      s.grid = {0.0, 0.25, 0.5, 0.75, 1.0};
      // Five to twenty agents per region cannot cover 20 tasks x 5 once eligibility filters routes.
      s.base.agents_per_region_min = 20;
      s.base.agents_per_region_max = 60;
      s.base.feasibility_attempts = 50;
      break;
    case Family::Charging: s.grid = {1, 2, 3, 4, 5}; break;
  }
  return s;
}

inline void validate(const ExperimentSpec& s) {
  if (s.grid.empty()) throw ValidationError("experiment grid must not be empty");
  if (s.seeds.empty()) throw ValidationError("experiment needs at least one seed");
  if (s.algorithms.empty()) throw ValidationError("experiment needs at least one algorithm");
  const auto valid = valid_algorithms(s.family);
  for (const auto& a : s.algorithms)
    if (std::find(valid.begin(), valid.end(), a) == valid.end())
      throw ValidationError("algorithm '" + a + "' is not valid for family " + to_string(s.family));
  for (double v : s.grid) {
    if (!std::isfinite(v)) throw ValidationError("grid values must be finite");
    switch (s.family) {
      case Family::VaryDistribution: grid_distribution(v); break;
      case Family::WeightSweep:
        if (v < 0.0 || v > 1.0) throw ValidationError("k_t grid values must lie in [0,1]");
        break;
      default:
        if (v < 0.0 || v != std::floor(v)) throw ValidationError("grid values must be non-negative integers");
        if (s.family == Family::VaryQ && v < 1.0) throw ValidationError("q grid values must be at least 1");
    }
  }
  if (s.charging_regions < 1 || !(s.charging_region_size > 0.0)) throw ValidationError("bad charging region layout");
  agco::validate(s.base);
}

// ---------------------------------------------------------------------------
// Spec file
// ---------------------------------------------------------------------------

namespace detail {

inline Rect rect_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 4) throw ValidationError(std::string(key) + " must be [x0, y0, x1, y1]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline std::pair<std::size_t, std::size_t> range_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(std::string(key) + " must be [lo, hi]");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

inline void apply_overrides(ExperimentSpec& s, const json& base) {
  GenConfig& c = s.base;
  for (const auto& [key, v] : base.items()) {
    if (key == "distribution") c.distribution = distribution_from_string(v.get<std::string>());
    else if (key == "num_agents") c.num_agents = v.get<std::size_t>();
    else if (key == "num_tasks") c.num_tasks = v.get<std::size_t>();
    else if (key == "uav_fraction") c.uav_fraction = v.get<double>();
    else if (key == "area") c.area = rect_from_json(v, "area");
    else if (key == "agent_region") c.agent_region = rect_from_json(v, "agent_region");
    else if (key == "uav_speed") c.uav_speed = v.get<double>();
    else if (key == "ugv_speed") c.ugv_speed = v.get<double>();
    else if (key == "uav_altitude") c.uav_altitude = v.get<double>();
    else if (key == "max_travel") c.max_travel = v.get<double>();
    else if (key == "capability_dims") c.capability_dims = v.get<std::size_t>();
    else if (key == "q") c.q = QPolicy::fixed(v.get<std::size_t>());
    else if (key == "q_range") {
      const auto [lo, hi] = range_from_json(v, "q_range");
      c.q = QPolicy::uniform(lo, hi);
    } else if (key == "p") c.p = v.get<std::size_t>();
    else if (key == "regions") std::tie(c.regions_min, c.regions_max) = range_from_json(v, "regions");
    else if (key == "agents_per_region") std::tie(c.agents_per_region_min, c.agents_per_region_max) = range_from_json(v, "agents_per_region");
    else if (key == "maft_tasks") c.maft_tasks = v.get<std::size_t>();
    else if (key == "maft_demand") c.maft_demand = v.get<std::size_t>();
    else if (key == "grid_jitter") c.grid_jitter = v.get<double>();
    else if (key == "feasibility_attempts") c.feasibility_attempts = v.get<std::size_t>();
    else if (key == "charging_regions") s.charging_regions = v.get<std::size_t>();
    else if (key == "charging_region_size") s.charging_region_size = v.get<double>();
    else if (key == "consumption_rate") s.charging.consumption_rate = v.get<double>();
    else if (key == "charging_distance") s.charging.charging_distance = v.get<double>();
    else if (key == "reserve_factor") s.charging.reserve_factor = v.get<double>();
    else if (key == "k") s.charging.k = v.get<double>();
    else if (key == "dt") s.sim.dt = v.get<double>();
    else if (key == "horizon") s.sim.horizon = v.get<double>();
    else if (key == "semantics") {
      const auto m = v.get<std::string>();
      if (m != "path" && m != "star") throw ValidationError("semantics must be path or star");
      s.famt.semantics = m == "path" ? DistanceSemantics::Path : DistanceSemantics::Star;
    } else if (key == "node_budget") s.ilp.node_budget = v.get<std::size_t>();
    else throw ValidationError("unknown base override '" + key + "'");
  }
}

}  // namespace detail

/// Spec file: {"family", "grid"?, "seeds"? | "seed_count"?, "algorithms"?, "base"?, "output"?}.
inline ExperimentSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family")) throw ValidationError("experiment spec needs a 'family'");
  try {
    const Family f = family_from_string(j.at("family").get<std::string>());
    ExperimentSpec s = default_spec(f, j.value("seed_count", std::size_t{20}));
    for (const auto& [key, v] : j.items()) {
      if (key == "family" || key == "seed_count") continue;
      if (key == "grid") {
        s.grid.clear();
        for (const auto& g : v) {
          if (f == Family::VaryDistribution && g.is_string()) {
            const Distribution d = distribution_from_string(g.get<std::string>());
            s.grid.push_back(d == Distribution::Compact ? 0 : d == Distribution::Scattered ? 1 : 2);
          } else {
            s.grid.push_back(g.get<double>());
          }
        }
        s.default_grid = false;
      } else if (key == "seeds") s.seeds = v.get<std::vector<std::uint64_t>>();
      else if (key == "algorithms") s.algorithms = v.get<std::vector<std::string>>();
      else if (key == "base") detail::apply_overrides(s, v);
      else if (key == "output") s.output = v.get<std::string>();
      else throw ValidationError("unknown spec field '" + key + "'");
    }
    validate(s);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed experiment spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct Row {
  std::string family;
  std::string param;
  std::string value;
  std::uint64_t seed{0};
  std::string algorithm;
  std::string scenario_hash;
  double tasks_completed{NAN};
  double total_distance{NAN};
  double total_time{NAN};
  double objective{NAN};
  int pareto_flag{-1};  // -1 not applicable
  double runtime_ms{0.0};
  std::string error;

  std::size_t grid_index{0};
  std::size_t seed_index{0};
  std::size_t algorithm_index{0};
};

inline const std::vector<std::string>& raw_header() {
  static const std::vector<std::string> h{"family",         "param",          "value",      "seed",
                                          "algorithm",      "scenario_hash",  "tasks_completed", "total_distance",
                                          "total_time",     "objective",      "pareto_flag", "runtime_ms",
                                          "error"};
  return h;
}

inline const std::vector<std::string>& aggregate_header() {
  static const std::vector<std::string> h{
      "family",       "param",           "value",           "algorithm",          "runs",          "errors",
      "tasks_completed_mean", "tasks_completed_std", "total_distance_mean", "total_distance_std", "total_time_mean",
      "total_time_std", "objective_mean", "objective_std", "runtime_ms_mean"};
  return h;
}

namespace detail {

inline std::string cell(double v) { return std::isnan(v) ? "" : io::format_number(v); }

template <class F>
double timed_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline GenConfig famt_config(const ExperimentSpec& s, double v, std::uint64_t seed) {
  GenConfig c = s.base;
  c.seed = seed;
  switch (s.family) {
    case Family::VaryTasks: c.num_tasks = static_cast<std::size_t>(v); break;
    case Family::VaryAgents: c.num_agents = static_cast<std::size_t>(v); break;
    case Family::VaryQ: c.q = QPolicy::fixed(static_cast<std::size_t>(v)); break;
    case Family::VaryDistribution: c.distribution = grid_distribution(v); break;
    default: break;
  }
  return c;
}

inline Minutes famt_time(const FamtScenario& sc, const FamtAssignment& a) {
  Minutes t = 0.0;
  for (std::size_t i = 0; i < a.plans.size(); ++i) t += a.plans[i].distance / sc.agents[i].speed;
  return t;
}

/// Rows for one (grid point, seed) unit of a FAMT family.
inline std::vector<Row> famt_unit(const ExperimentSpec& s, std::size_t gi, std::size_t si, const Row& proto) {
  std::vector<Row> rows;
  FamtScenario sc;
  std::string hash;
  std::string gen_error;
  try {
    sc = gen_famt(famt_config(s, s.grid[gi], s.seeds[si]));
    hash = io::scenario_hash(sc);
  } catch (const std::exception& e) {
    gen_error = e.what();
  }
  for (std::size_t ai = 0; ai < s.algorithms.size(); ++ai) {
    Row r = proto;
    r.algorithm = s.algorithms[ai];
    r.algorithm_index = ai;
    r.scenario_hash = hash;
    if (!gen_error.empty()) {
      r.error = gen_error;
      rows.push_back(r);
      continue;
    }
    try {
      FamtAssignment a;
      r.runtime_ms = timed_ms([&] { a = r.algorithm == "mt-mcmf" ? solve_mt_mcmf(sc, s.famt) : solve_greedy_pt(sc, s.famt); });
      r.tasks_completed = static_cast<double>(a.tasks_completed);
      r.total_distance = a.total_distance;
      r.total_time = famt_time(sc, a);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(r);
  }
  return rows;
}

/// One seed of a weight sweep: shared bounds, every weight, every algorithm, Pareto flags on W-ILP.
inline std::vector<Row> sweep_unit(const ExperimentSpec& s, std::size_t si, const Row& proto) {
  std::vector<Row> rows;
  std::string setup_error;
  MaftInstance inst;
  MaftOptions opts;
  opts.ilp = s.ilp;
  std::string hash;
  try {
    GenConfig c = s.base;
    c.seed = s.seeds[si];
    inst = gen_maft(c);
    hash = io::scenario_hash(inst);
    inst.require_feasible();
    opts.bounds = objective_bounds(inst, s.ilp);
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  std::vector<ParetoPoint> ilp_points;
  std::vector<std::size_t> ilp_rows;
  for (std::size_t gi = 0; gi < s.grid.size(); ++gi) {
    for (std::size_t ai = 0; ai < s.algorithms.size(); ++ai) {
      Row r = proto;
      r.value = grid_label(s.family, s.grid[gi]);
      r.grid_index = gi;
      r.algorithm = s.algorithms[ai];
      r.algorithm_index = ai;
      r.scenario_hash = hash;
      if (!setup_error.empty()) {
        r.error = setup_error;
        rows.push_back(r);
        continue;
      }
      try {
        MaftAssignment a;
        const auto w = WeightConfig::time_weight(s.grid[gi]);
        r.runtime_ms = timed_ms([&] { a = r.algorithm == "w-ilp" ? solve_w_ilp(inst, w, opts) : solve_w_grd(inst, w, opts); });
        r.tasks_completed = 0;
        for (const auto& x : a.x) r.tasks_completed += static_cast<double>(x.count);
        r.total_distance = a.raw_distance;
        r.total_time = a.raw_time;
        r.objective = a.objective;
        if (r.algorithm == "w-ilp") {
          ilp_points.push_back({w.k_t, w.k_d, a.raw_time, a.raw_distance, a.objective, false, {}});
          ilp_rows.push_back(rows.size());
        }
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      rows.push_back(r);
    }
  }
  flag_pareto(ilp_points);
  for (std::size_t i = 0; i < ilp_rows.size(); ++i) rows[ilp_rows[i]].pareto_flag = ilp_points[i].pareto ? 1 : 0;
  return rows;
}

/// Square region cells in a near-square grid, one UGV per cell.
inline std::vector<ChargingScenario> charging_cells(const ExperimentSpec& s, std::size_t uavs, std::uint64_t seed) {
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s.charging_regions))));
  std::vector<ChargingScenario> out;
  for (std::size_t r = 0; r < s.charging_regions; ++r) {
    ChargingGenConfig c = s.charging;
    c.seed = derive_seed(seed, 100 + r);
    c.num_uavs = uavs;
    const double x0 = static_cast<double>(r % cols) * s.charging_region_size;
    const double y0 = static_cast<double>(r / cols) * s.charging_region_size;
    c.cell = {x0, y0, x0 + s.charging_region_size, y0 + s.charging_region_size};
    ChargingScenario sc = gen_charging(c);
    sc.id = "region" + std::to_string(r);
    out.push_back(std::move(sc));
  }
  return out;
}

inline std::vector<Row> charging_unit(const ExperimentSpec& s, std::size_t gi, std::size_t si, const Row& proto) {
  std::vector<Row> rows;
  std::vector<ChargingScenario> cells;
  std::string hash, gen_error;
  try {
    cells = charging_cells(s, static_cast<std::size_t>(s.grid[gi]), s.seeds[si]);
    std::string all;
    for (const auto& c : cells) all += io::to_json(c).dump();
    hash = io::hex64(io::fnv1a(all));
  } catch (const std::exception& e) {
    gen_error = e.what();
  }
  for (std::size_t ai = 0; ai < s.algorithms.size(); ++ai) {
    Row r = proto;
    r.algorithm = s.algorithms[ai];
    r.algorithm_index = ai;
    r.scenario_hash = hash;
    if (!gen_error.empty()) {
      r.error = gen_error;
      rows.push_back(r);
      continue;
    }
    try {
      double distance = 0.0, time = 0.0, charged = 0.0;
      bool complete = true;
      r.runtime_ms = timed_ms([&] {
        for (const auto& c : cells) {
          const SimResult res = r.algorithm == "pctp" ? run_pctp(c, s.sim) : run_static(c, s.sim);
          distance += res.total_distance;
          time = std::max(time, res.time_to_last_charge);
          for (UavState st : res.final_state) charged += st == UavState::Charged ? 1.0 : 0.0;
          complete = complete && res.complete;
        }
      });
      r.tasks_completed = charged;
      r.total_distance = distance;
      r.total_time = time;
      if (!complete) r.error = "not every UAV reached its UGV";
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    rows.push_back(r);
  }
  return rows;
}

inline std::size_t thread_cap() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AGCO_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = v;
  }
  return n;
}

}  // namespace detail

struct ExperimentResult {
  std::vector<Row> rows;
  std::size_t failures{0};
};

/// Runs every (grid point, seed, algorithm) cell. Rows come back sorted by grid point, seed and
/// algorithm regardless of scheduling.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  struct Unit {
    std::size_t grid, seed;
  };
  std::vector<Unit> units;
  if (spec.family == Family::WeightSweep) {
    for (std::size_t si = 0; si < spec.seeds.size(); ++si) units.push_back({0, si});
  } else {
    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi)
      for (std::size_t si = 0; si < spec.seeds.size(); ++si) units.push_back({gi, si});
  }

  std::vector<std::vector<Row>> out(units.size());
  auto work = [&](std::size_t u) {
    Row proto;
    proto.family = to_string(spec.family);
    proto.param = parameter_name(spec.family);
    proto.grid_index = units[u].grid;
    proto.seed_index = units[u].seed;
    proto.seed = spec.seeds[units[u].seed];
    proto.value = grid_label(spec.family, spec.grid[units[u].grid]);
    switch (spec.family) {
      case Family::WeightSweep: out[u] = detail::sweep_unit(spec, units[u].seed, proto); break;
      case Family::Charging: out[u] = detail::charging_unit(spec, units[u].grid, units[u].seed, proto); break;
      default: out[u] = detail::famt_unit(spec, units[u].grid, units[u].seed, proto); break;
    }
  };

  const std::size_t threads = std::min(detail::thread_cap(), units.size());
  if (threads <= 1) {
    for (std::size_t u = 0; u < units.size(); ++u) work(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t u; (u = next.fetch_add(1)) < units.size();) work(u);
      });
    for (auto& t : pool) t.join();
  }

  ExperimentResult res;
  for (auto& v : out)
    for (auto& r : v) res.rows.push_back(std::move(r));
  std::sort(res.rows.begin(), res.rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.grid_index, a.seed_index, a.algorithm_index) < std::tie(b.grid_index, b.seed_index, b.algorithm_index);
  });
  for (const auto& r : res.rows) res.failures += r.error.empty() ? 0 : 1;
  return res;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::vector<std::string> raw_cells(const Row& r, bool with_runtime = true) {
  return {r.family,
          r.param,
          r.value,
          std::to_string(r.seed),
          r.algorithm,
          r.scenario_hash,
          detail::cell(r.tasks_completed),
          detail::cell(r.total_distance),
          detail::cell(r.total_time),
          detail::cell(r.objective),
          r.pareto_flag < 0 ? "" : std::to_string(r.pareto_flag),
          with_runtime ? io::format_number(r.runtime_ms) : "",
          r.error};
}

inline void write_raw_csv(std::ostream& out, const std::vector<Row>& rows) {
  io::write_csv_row(out, raw_header());
  for (const auto& r : rows) io::write_csv_row(out, raw_cells(r));
}

struct AggregateRow {
  std::string family, param, value, algorithm;
  std::size_t runs{0}, errors{0};
  double tasks_mean{NAN}, tasks_std{NAN};
  double distance_mean{NAN}, distance_std{NAN};
  double time_mean{NAN}, time_std{NAN};
  double objective_mean{NAN}, objective_std{NAN};
  double runtime_mean{NAN};
};

/// Mean and sample standard deviation per (grid point, algorithm) over successful rows.
inline std::vector<AggregateRow> aggregate(const std::vector<Row>& rows) {
  using Key = std::tuple<std::size_t, std::size_t>;
  std::map<Key, std::vector<const Row*>> groups;
  for (const auto& r : rows) groups[{r.grid_index, r.algorithm_index}].push_back(&r);
  auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    if (v.empty()) return;
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    sd = 0.0;
    if (v.size() > 1) {
      for (double x : v) sd += (x - mean) * (x - mean);
      sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
    }
  };
  std::vector<AggregateRow> out;
  for (const auto& [key, group] : groups) {
    AggregateRow a;
    a.family = group.front()->family;
    a.param = group.front()->param;
    a.value = group.front()->value;
    a.algorithm = group.front()->algorithm;
    a.runs = group.size();
    std::vector<double> tasks, dist, time, obj, rt;
    for (const Row* r : group) {
      if (!r->error.empty()) {
        ++a.errors;
        continue;
      }
      tasks.push_back(r->tasks_completed);
      dist.push_back(r->total_distance);
      time.push_back(r->total_time);
      if (!std::isnan(r->objective)) obj.push_back(r->objective);
      rt.push_back(r->runtime_ms);
    }
    double unused = 0.0;
    stats(tasks, a.tasks_mean, a.tasks_std);
    stats(dist, a.distance_mean, a.distance_std);
    stats(time, a.time_mean, a.time_std);
    stats(obj, a.objective_mean, a.objective_std);
    stats(rt, a.runtime_mean, unused);
    out.push_back(std::move(a));
  }
  return out;
}

inline void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  io::write_csv_row(out, aggregate_header());
  using detail::cell;
  for (const auto& a : rows)
    io::write_csv_row(out, {a.family, a.param, a.value, a.algorithm, std::to_string(a.runs), std::to_string(a.errors),
                            cell(a.tasks_mean), cell(a.tasks_std), cell(a.distance_mean), cell(a.distance_std),
                            cell(a.time_mean), cell(a.time_std), cell(a.objective_mean), cell(a.objective_std),
                            cell(a.runtime_mean)});
}

inline json to_json(const ExperimentSpec& s, const ExperimentResult& res) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json j{{"schema_version", io::kSchemaVersion}, {"type", "experiment_result"}, {"family", to_string(s.family)}};
  j["metadata"] = {{"grid_source", s.default_grid ? "default configuration grid" : "spec file"},
                   {"seeds", s.seeds},
                   {"algorithms", s.algorithms},
                   {"failures", res.failures}};
  j["rows"] = json::array();
  for (const auto& r : res.rows) {
    json row;
    const auto cells = raw_cells(r);
    for (std::size_t i = 0; i < cells.size(); ++i) row[raw_header()[i]] = cells[i];
    row["seed"] = r.seed;
    row["tasks_completed"] = num(r.tasks_completed);
    row["total_distance"] = num(r.total_distance);
    row["total_time"] = num(r.total_time);
    row["objective"] = num(r.objective);
    row["pareto_flag"] = r.pareto_flag < 0 ? json(nullptr) : json(r.pareto_flag == 1);
    row["runtime_ms"] = r.runtime_ms;
    j["rows"].push_back(row);
  }
  j["aggregate"] = json::array();
  for (const auto& a : aggregate(res.rows))
    j["aggregate"].push_back({{"param", a.param},
                              {"value", a.value},
                              {"algorithm", a.algorithm},
                              {"runs", a.runs},
                              {"errors", a.errors},
                              {"tasks_completed_mean", num(a.tasks_mean)},
                              {"total_distance_mean", num(a.distance_mean)},
                              {"total_distance_std", num(a.distance_std)},
                              {"total_time_mean", num(a.time_mean)},
                              {"objective_mean", num(a.objective_mean)}});
  return j;
}

}  // namespace agco::bench
