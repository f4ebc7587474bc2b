#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "agco/bench.hpp"
#include "agco/charging.hpp"
#include "agco/famt.hpp"
#include "agco/io.hpp"
#include "agco/maft.hpp"
#include "agco/scenario.hpp"

using namespace agco;
using io::json;

namespace {

constexpr int kSolverFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed{0};
  std::string in;
  std::string out;
  std::string format{"json"};
};

void add_common(CLI::App* cmd, Common& c, bool with_input = true) {
  cmd->add_option("--seed", c.seed, "Scenario seed (used when no --in file is given)");
  if (with_input) cmd->add_option("--in", c.in, "Scenario JSON file; generated from --seed when omitted");
  cmd->add_option("--out", c.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw io::FormatError(path + ": " + e.what());
  }
}

// ----- gen -----

struct GenArgs {
  Common common;
  std::string kind{"famt"};
  std::string distribution{"hybrid"};
  std::size_t agents{4}, tasks{20}, q{3}, p{6};
  double max_travel{5000.0};
  double uav_fraction{0.5};
  std::size_t uavs{3};
  std::string placement{"corner"};
  std::size_t feasibility_attempts{0};
  std::vector<std::size_t> region_agents{5, 20};
};

int run_gen(const GenArgs& a) {
  if (a.common.format != "json") throw UsageError("gen writes JSON only");
  json doc;
  if (a.kind == "charging") {
    ChargingGenConfig c;
    c.seed = a.common.seed;
    c.num_uavs = a.uavs;
    c.placement = a.placement == "uniform" ? UgvPlacement::Uniform : UgvPlacement::Corner;
    doc = io::to_json(gen_charging(c));
  } else {
    GenConfig c;
    c.seed = a.common.seed;
    c.distribution = distribution_from_string(a.distribution);
    c.num_agents = a.agents;
    c.num_tasks = a.tasks;
    c.q = QPolicy::fixed(a.q);
    c.p = a.p;
    c.max_travel = a.max_travel;
    c.uav_fraction = a.uav_fraction;
    c.feasibility_attempts = a.feasibility_attempts;
    c.agents_per_region_min = a.region_agents.at(0);
    c.agents_per_region_max = a.region_agents.at(1);
    doc = a.kind == "famt" ? io::to_json(gen_famt(c)) : io::to_json(gen_maft(c));
  }
  emit(a.common.out, doc.dump(2) + "\n");
  return 0;
}

// ----- solve-famt -----

struct FamtArgs {
  Common common;
  std::string algo{"mcmf"};
  std::string semantics{"path"};
  std::string dump_dot;
};

int run_solve_famt(const FamtArgs& a) {
  FamtScenario s;
  if (a.common.in.empty()) {
    GenConfig c;
    c.seed = a.common.seed;
    s = gen_famt(c);
  } else {
    s = io::famt_scenario_from_json(read_json(a.common.in));
  }
  FamtOptions opt;
  opt.semantics = a.semantics == "star" ? DistanceSemantics::Star : DistanceSemantics::Path;
  if (!a.dump_dot.empty()) emit(a.dump_dot, flow::to_dot(build_famt_network(s, opt).graph));
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = a.algo == "mcmf" ? solve_mt_mcmf(s, opt) : solve_greedy_pt(s, opt);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (a.common.format == "json") {
    emit(a.common.out, io::to_json(result, s).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    io::write_csv_row(csv, io::famt_summary_header());
    io::write_csv_row(csv, io::famt_summary_row(io::scenario_hash(s), s, result, ms));
    emit(a.common.out, csv.str());
  }
  return 0;
}

// ----- solve-maft -----

struct MaftArgs {
  Common common;
  std::string algo{"wilp"};
  double kt{0.5};
  std::vector<double> sweep;
  std::size_t feasibility_attempts{50};
};

int run_solve_maft(const MaftArgs& a) {
  MaftInstance inst;
  if (a.common.in.empty()) {
    GenConfig c = bench::default_spec(bench::Family::WeightSweep).base;
    c.seed = a.common.seed;
    c.feasibility_attempts = a.feasibility_attempts;
    inst = gen_maft(c);
  } else {
    inst = io::maft_instance_from_json(read_json(a.common.in));
  }
  if (!a.sweep.empty()) {
    const auto points = pareto_sweep(inst, a.sweep);
    std::string failed;
    for (const auto& p : points)
      if (failed.empty()) failed = p.error;
    if (a.common.format == "csv") {
      std::ostringstream csv;
      io::write_sweep_csv(csv, points);
      emit(a.common.out, csv.str());
    } else {
      json j{{"schema_version", io::kSchemaVersion}, {"type", "maft_sweep"}, {"points", json::array()}};
      for (const auto& p : points)
        j["points"].push_back({{"k_t", p.k_t}, {"k_d", p.k_d}, {"time", p.time}, {"distance", p.distance},
                               {"objective", p.objective}, {"pareto", p.pareto}, {"error", p.error}});
      emit(a.common.out, j.dump(2) + "\n");
    }
    if (!failed.empty()) {
      std::cerr << "error: " << failed << "\n";
      return kSolverFailure;
    }
    return 0;
  }
  const auto w = WeightConfig::time_weight(a.kt);
  const auto result = a.algo == "wilp" ? solve_w_ilp(inst, w) : solve_w_grd(inst, w);
  if (a.common.format == "json") {
    emit(a.common.out, io::to_json(result, inst).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    io::write_csv_row(csv, {"algorithm", "k_t", "k_d", "time", "distance", "objective"});
    io::write_csv_row(csv, {result.algorithm, io::format_number(w.k_t), io::format_number(w.k_d),
                            io::format_number(result.raw_time), io::format_number(result.raw_distance),
                            io::format_number(result.objective)});
    emit(a.common.out, csv.str());
  }
  return 0;
}

// ----- sim-charging -----

struct SimArgs {
  Common common;
  std::string algo{"pctp"};
  double dt{0.1};
  double horizon{10'000.0};
  std::size_t uavs{3};
};

int run_sim(const SimArgs& a) {
  ChargingScenario sc;
  if (a.common.in.empty()) {
    ChargingGenConfig c;
    c.seed = a.common.seed;
    c.num_uavs = a.uavs;
    sc = gen_charging(c);
  } else {
    sc = io::charging_scenario_from_json(read_json(a.common.in));
  }
  SimOptions opt;
  opt.dt = a.dt;
  opt.horizon = a.horizon;
  opt.record_trajectory = a.common.format == "csv";
  const auto r = a.algo == "pctp" ? run_pctp(sc, opt) : run_static(sc, opt);
  if (a.common.format == "json") {
    emit(a.common.out, io::to_json(r, sc).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    io::write_trajectory_csv(csv, r.trajectory);
    emit(a.common.out, csv.str());
  }
  if (!r.complete) {
    std::cerr << "error: not every UAV reached the UGV\n";
    return kSolverFailure;
  }
  return 0;
}

// ----- bench -----

struct BenchArgs {
  Common common;
  std::string family;
  std::string config;
  std::size_t seed_count{20};
};

std::string companion(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_aggregate";
  return path.substr(0, dot) + "_aggregate" + path.substr(dot);
}

int run_bench(const BenchArgs& a) {
  if (a.family.empty() == a.config.empty()) throw UsageError("bench needs exactly one of --family or --config");
  bench::ExperimentSpec spec = a.config.empty() ? bench::default_spec(bench::family_from_string(a.family), a.seed_count)
                                                : bench::spec_from_json(read_json(a.config));
  if (a.config.empty())
    for (auto& seed : spec.seeds) seed += a.common.seed;
  std::string out = a.common.out.empty() ? spec.output : a.common.out;
  const auto res = bench::run_experiment(spec);
  if (a.common.format == "json") {
    emit(out, bench::to_json(spec, res).dump(2) + "\n");
  } else {
    std::ostringstream raw, agg;
    bench::write_raw_csv(raw, res.rows);
    emit(out, raw.str());
    if (!out.empty() && out != "-") {
      bench::write_aggregate_csv(agg, bench::aggregate(res.rows));
      emit(companion(out), agg.str());
    }
  }
  std::cerr << res.rows.size() << " rows, " << res.failures << " failed\n";
  return res.failures ? kSolverFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Air-ground task allocation and charging toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a scenario as JSON");
  add_common(g, gen.common, false);
  g->add_option("--kind", gen.kind, "Scenario kind")->check(CLI::IsMember({"famt", "maft", "charging"}));
  g->add_option("--distribution", gen.distribution, "FAMT task layout: compact, scattered or hybrid");
  g->add_option("--agents", gen.agents, "FAMT agent count");
  g->add_option("--tasks", gen.tasks, "FAMT task count");
  g->add_option("--q", gen.q, "Tasks per FAMT agent");
  g->add_option("--p", gen.p, "Agents per task (FAMT cap, MAFT demand)");
  g->add_option("--max-travel", gen.max_travel, "FAMT travel budget in meters");
  g->add_option("--uav-fraction", gen.uav_fraction, "Share of FAMT agents that are UAVs");
  g->add_option("--uavs", gen.uavs, "Charging: UAVs in the cell");
  g->add_option("--placement", gen.placement, "Charging: UGV placement")->check(CLI::IsMember({"corner", "uniform"}));
  g->add_option("--region-agents", gen.region_agents, "MAFT: min and max agents per region")->expected(2);
  g->add_option("--feasible-attempts", gen.feasibility_attempts, "MAFT: redraws allowed to reach a feasible instance");

  FamtArgs famt;
  auto* f = app.add_subcommand("solve-famt", "Allocate a few-agents-more-tasks scenario");
  add_common(f, famt.common);
  f->add_option("--algo", famt.algo, "Solver")->check(CLI::IsMember({"mcmf", "greedy"}));
  f->add_option("--semantics", famt.semantics, "Per-agent distance: path or star")->check(CLI::IsMember({"path", "star"}));
  f->add_option("--dump-dot", famt.dump_dot, "Write the flow network in DOT format to this path");

  MaftArgs maft;
  auto* m = app.add_subcommand("solve-maft", "Allocate a more-agents-few-tasks instance");
  add_common(m, maft.common);
  m->add_option("--algo", maft.algo, "Solver")->check(CLI::IsMember({"wilp", "wgrd"}));
  m->add_option("--kt", maft.kt, "Time weight k_t; k_d = 1 - k_t")->check(CLI::Range(0.0, 1.0));
  m->add_option("--sweep", maft.sweep, "Solve W-ILP at each of these k_t values and flag Pareto points");
  m->add_option("--feasible-attempts", maft.feasibility_attempts, "Redraws allowed when generating from --seed (20-60 agents per region)");

  SimArgs sim;
  auto* s = app.add_subcommand("sim-charging", "Simulate UAV recharging rendezvous");
  add_common(s, sim.common);
  s->add_option("--algo", sim.algo, "UGV policy")->check(CLI::IsMember({"pctp", "static"}));
  s->add_option("--dt", sim.dt, "Step in minutes");
  s->add_option("--horizon", sim.horizon, "Simulation horizon in minutes");
  s->add_option("--uavs", sim.uavs, "UAVs when generating from --seed");

  BenchArgs bch;
  auto* b = app.add_subcommand("bench", "Run an experiment family and write raw and aggregate tables");
  b->add_option("--seed", bch.common.seed, "First seed for --family runs");
  b->add_option("--out", bch.common.out, "Raw table path; the aggregate goes next to it with an _aggregate suffix");
  b->add_option("--format", bch.common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  bch.common.format = "csv";
  b->add_option("--family", bch.family, "vary_tasks, vary_agents, vary_q, vary_distribution, weight_sweep or charging");
  b->add_option("--config", bch.config, "Experiment spec JSON");
  b->add_option("--seeds", bch.seed_count, "Number of consecutive seeds for --family runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*g) return run_gen(gen);
    if (*f) return run_solve_famt(famt);
    if (*m) return run_solve_maft(maft);
    if (*s) return run_sim(sim);
    if (*b) return run_bench(bch);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}
