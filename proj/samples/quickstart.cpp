// Generates one scenario of each kind, solves it with both algorithms and prints a summary.

#include <cstdio>

#include "agco/bench.hpp"
#include "agco/charging.hpp"
#include "agco/famt.hpp"
#include "agco/maft.hpp"
#include "agco/scenario.hpp"

int main() {
  using namespace agco;

  GenConfig famt_cfg;
  famt_cfg.seed = 42;
  const FamtScenario famt = gen_famt(famt_cfg);
  const auto flow = solve_mt_mcmf(famt);
  const auto greedy = solve_greedy_pt(famt);
  std::printf("FAMT  %zu agents, %zu tasks\n", famt.agents.size(), famt.tasks.size());
  std::printf("  mt-mcmf   completed %zu, distance %.1f m\n", flow.tasks_completed, flow.total_distance);
  std::printf("  mt-grdpt  completed %zu, distance %.1f m\n", greedy.tasks_completed, greedy.total_distance);
  for (const auto& plan : flow.plans) {
    std::printf("  %s:", plan.agent_id.c_str());
    for (std::size_t t : plan.tasks) std::printf(" %s", famt.tasks[t].id.c_str());
    std::printf("  (%.1f m)\n", plan.distance);
  }

  GenConfig maft_cfg = bench::default_spec(bench::Family::WeightSweep).base;
  maft_cfg.seed = 42;
  const MaftInstance maft = gen_maft(maft_cfg);
  std::printf("MAFT  %zu regions, %zu tasks\n", maft.regions().size(), maft.tasks().size());
  for (double kt : {0.0, 0.5, 1.0}) {
    const auto w = WeightConfig::time_weight(kt);
    const auto ilp = solve_w_ilp(maft, w);
    const auto grd = solve_w_grd(maft, w);
    std::printf("  k_t=%.1f  w-ilp %.4f (%.0f min, %.0f m)  w-grd %.4f\n", kt, ilp.objective, ilp.raw_time,
                ilp.raw_distance, grd.objective);
  }

  ChargingGenConfig charge_cfg;
  charge_cfg.seed = 42;
  charge_cfg.num_uavs = 4;
  const ChargingScenario cell = gen_charging(charge_cfg);
  const auto pctp = run_pctp(cell);
  const auto fixed = run_static(cell);
  std::printf("Charging  %zu UAVs\n", cell.uavs.size());
  std::printf("  pctp    %.1f m, last charge at %.1f min\n", pctp.total_distance, pctp.time_to_last_charge);
  std::printf("  static  %.1f m, last charge at %.1f min\n", fixed.total_distance, fixed.time_to_last_charge);
  return pctp.complete && fixed.complete ? 0 : 1;
}
