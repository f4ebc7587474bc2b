#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "agco/charging.hpp"
#include "agco/maft.hpp"
#include "agco/model.hpp"

namespace agco {

// ---------------------------------------------------------------------------
// Seeded randomness
// ---------------------------------------------------------------------------

/// splitmix64 finalizer; derives independent stream seeds from one user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// mt19937_64 with fixed bit-to-value mappings, so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return lo + v % span;
  }

 private:
  std::mt19937_64 engine_;
};

enum class Distribution { Compact, Scattered, Hybrid };

inline const char* to_string(Distribution d) {
  switch (d) {
    case Distribution::Compact: return "compact";
    case Distribution::Scattered: return "scattered";
    case Distribution::Hybrid: return "hybrid";
  }
  return "?";
}

inline Distribution distribution_from_string(const std::string& s) {
  if (s == "compact") return Distribution::Compact;
  if (s == "scattered") return Distribution::Scattered;
  if (s == "hybrid") return Distribution::Hybrid;
  throw ValidationError("unknown distribution '" + s + "' (expected compact, scattered or hybrid)");
}

struct Rect {
  double x0{0.0}, y0{0.0}, x1{0.0}, y1{0.0};

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(const Position& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains(const Rect& r) const { return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1; }
  bool valid() const { return std::isfinite(x0) && std::isfinite(y0) && x1 > x0 && y1 > y0; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Task limit policy: one fixed q per kind, or uniform per agent in [lo, hi].
struct QPolicy {
  bool random{false};
  std::size_t uav{3};
  std::size_t ugv{3};
  std::size_t lo{2};
  std::size_t hi{7};

  static QPolicy fixed(std::size_t q) { return {false, q, q, 2, 7}; }
  static QPolicy uniform(std::size_t lo, std::size_t hi) { return {true, 3, 3, lo, hi}; }
};

struct GenConfig {
  std::uint64_t seed{0};
  Distribution distribution{Distribution::Hybrid};

  // Few-agents-more-tasks
  std::size_t num_agents{4};
  std::size_t num_tasks{20};
  double uav_fraction{0.5};
  Rect area{0.0, 0.0, 1000.0, 1000.0};
  Rect agent_region{300.0, 300.0, 700.0, 700.0};
  MetersPerMinute uav_speed{20.0};
  MetersPerMinute ugv_speed{5.0};
  Meters uav_altitude{10.0};
  Meters max_travel{5000.0};
  std::size_t capability_dims{2};
  double agent_capability_lo{1.0}, agent_capability_hi{5.0};
  double task_requirement_lo{1.0}, task_requirement_hi{3.0};
  QPolicy q{QPolicy::fixed(3)};
  std::size_t p{6};

  // More-agents-few-tasks
  std::size_t regions_min{3}, regions_max{5};
  std::size_t agents_per_region_min{5}, agents_per_region_max{20};
  std::size_t maft_tasks{20};
  std::size_t maft_demand{5};
  double grid_jitter{0.1};  // fraction of a grid cell
  /// When > 0, redraw (from derived seeds) up to this many times until the instance is feasible.
  std::size_t feasibility_attempts{0};
};

inline void validate(const GenConfig& c) {
  if (!c.area.valid() || !c.agent_region.valid()) throw ValidationError("gen: area and agent region must be non-empty");
  if (!c.area.contains(c.agent_region)) throw ValidationError("gen: agent region must lie inside the area");
  if (c.p < 1 || c.maft_demand < 1) throw ValidationError("gen: p must be at least 1");
  if (!(c.uav_fraction >= 0.0 && c.uav_fraction <= 1.0)) throw ValidationError("gen: uav_fraction must be in [0,1]");
  if (c.capability_dims < 1) throw ValidationError("gen: capability_dims must be at least 1");
  if (!(c.agent_capability_lo > 0.0) || c.agent_capability_hi < c.agent_capability_lo || !(c.task_requirement_lo > 0.0) ||
      c.task_requirement_hi < c.task_requirement_lo)
    throw ValidationError("gen: capability ranges must be positive and ordered");
  if (c.q.random ? (c.q.lo < 1 || c.q.hi < c.q.lo) : (c.q.uav < 1 || c.q.ugv < 1))
    throw ValidationError("gen: task limits must be at least 1");
  if (c.regions_min < 1 || c.regions_max < c.regions_min) throw ValidationError("gen: bad region count range");
  if (c.agents_per_region_max < c.agents_per_region_min) throw ValidationError("gen: bad agents-per-region range");
  if (!(c.uav_speed > 0.0) || !(c.ugv_speed > 0.0) || !(c.max_travel > 0.0))
    throw ValidationError("gen: speeds and travel budget must be positive");
}

namespace detail {

enum Stream : std::uint64_t { kAgents = 1, kTasks = 2, kRegions = 3, kMaftTasks = 4, kCharging = 5 };

inline CapabilityVector draw_capabilities(Rng& rng, std::size_t dims, double lo, double hi) {
  std::vector<double> v(dims);
  for (double& x : v) x = rng.uniform(lo, hi);
  return CapabilityVector(std::move(v));
}

inline Position draw_in(Rng& rng, const Rect& r) { return {rng.uniform(r.x0, r.x1), rng.uniform(r.y0, r.y1), 0.0}; }

}  // namespace detail

/// Agents uniform in the agent region; tasks per distribution. Agents and tasks come from
/// separate streams drawn sequentially, so a smaller count is always a prefix of a larger one.
inline FamtScenario gen_famt(const GenConfig& c) {
  validate(c);
  if (c.distribution == Distribution::Scattered && c.agent_region.contains(c.area))
    throw ValidationError("gen: scattered tasks need area outside the agent region");
  FamtScenario s;
  Rng agents(derive_seed(c.seed, detail::kAgents));
  for (std::size_t i = 0; i < c.num_agents; ++i) {
    Agent a;
    a.id = "a" + std::to_string(i);
    a.kind = agents.uniform() < c.uav_fraction ? AgentKind::UAV : AgentKind::UGV;
    a.position = detail::draw_in(agents, c.agent_region);
    if (a.kind == AgentKind::UAV) a.position.h = c.uav_altitude;
    a.speed = a.kind == AgentKind::UAV ? c.uav_speed : c.ugv_speed;
    a.capabilities = detail::draw_capabilities(agents, c.capability_dims, c.agent_capability_lo, c.agent_capability_hi);
    a.max_travel = c.max_travel;
    if (c.q.random)
      a.task_limit = agents.uniform_int(c.q.lo, c.q.hi);
    else
      a.task_limit = a.kind == AgentKind::UAV ? c.q.uav : c.q.ugv;
    s.agents.push_back(std::move(a));
  }
  Rng tasks(derive_seed(c.seed, detail::kTasks));
  for (std::size_t j = 0; j < c.num_tasks; ++j) {
    Task t;
    t.id = "t" + std::to_string(j);
    switch (c.distribution) {
      case Distribution::Compact: t.position = detail::draw_in(tasks, c.agent_region); break;
      case Distribution::Hybrid: t.position = detail::draw_in(tasks, c.area); break;
      case Distribution::Scattered:
        do t.position = detail::draw_in(tasks, c.area);
        while (c.agent_region.contains(t.position));
        break;
    }
    t.requirements = detail::draw_capabilities(tasks, c.capability_dims, c.task_requirement_lo, c.task_requirement_hi);
    t.max_agents = c.p;
    s.tasks.push_back(std::move(t));
  }
  return s;
}

namespace detail {

inline MaftInstance gen_maft_once(const GenConfig& c, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kRegions));
  const auto count = static_cast<std::size_t>(rng.uniform_int(c.regions_min, c.regions_max));
  // Jittered grid; the last row spreads its cells across the full width.
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  const std::size_t rows = (count + cols - 1) / cols;
  std::vector<Region> regions;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t row = i / cols;
    const std::size_t in_row = row + 1 < rows ? cols : count - cols * (rows - 1);
    const std::size_t col = i % cols;
    const double cw = c.area.width() / static_cast<double>(in_row);
    const double ch = c.area.height() / static_cast<double>(rows);
    Region r;
    r.id = "r" + std::to_string(i);
    const double cx = c.area.x0 + (static_cast<double>(col) + 0.5) * cw;
    const double cy = c.area.y0 + (static_cast<double>(row) + 0.5) * ch;
    r.position = {cx + rng.uniform(-0.5, 0.5) * c.grid_jitter * cw, cy + rng.uniform(-0.5, 0.5) * c.grid_jitter * ch, 0.0};
    const auto members = static_cast<std::size_t>(rng.uniform_int(c.agents_per_region_min, c.agents_per_region_max));
    for (std::size_t a = 0; a < members; ++a) (rng.uniform() < c.uav_fraction ? r.uav_count : r.ugv_count) += 1;
    r.uav_speed = c.uav_speed;
    r.ugv_speed = c.ugv_speed;
    r.uav_capabilities = draw_capabilities(rng, c.capability_dims, c.agent_capability_lo, c.agent_capability_hi);
    r.ugv_capabilities = draw_capabilities(rng, c.capability_dims, c.agent_capability_lo, c.agent_capability_hi);
    regions.push_back(std::move(r));
  }
  Rng trng(derive_seed(seed, kMaftTasks));
  std::vector<Task> tasks;
  for (std::size_t j = 0; j < c.maft_tasks; ++j) {
    Task t;
    t.id = "t" + std::to_string(j);
    t.position = draw_in(trng, c.area);
    t.requirements = draw_capabilities(trng, c.capability_dims, c.task_requirement_lo, c.task_requirement_hi);
    t.max_agents = c.maft_demand;
    tasks.push_back(std::move(t));
  }
  return MaftInstance(std::move(regions), std::move(tasks));
}

}  // namespace detail

/// Regions on an evenly spread jittered grid, each with a random UAV/UGV inventory, and tasks
/// uniform over the area. Infeasible draws are returned flagged (see MaftInstance::feasibility)
/// unless `feasibility_attempts` asks for redraws.
inline MaftInstance gen_maft(const GenConfig& c) {
  validate(c);
  MaftInstance inst = detail::gen_maft_once(c, c.seed);
  for (std::size_t attempt = 1; attempt <= c.feasibility_attempts && !inst.feasibility().feasible; ++attempt)
    inst = detail::gen_maft_once(c, derive_seed(c.seed, 1000 + attempt));
  return inst;
}

enum class UgvPlacement { Uniform, Corner };

struct ChargingGenConfig {
  std::uint64_t seed{0};
  /// Corner: the UGV waits at the cell's lower-left corner, a depot its UAVs work away from.
  UgvPlacement placement{UgvPlacement::Corner};
  std::size_t num_uavs{3};
  Rect cell{0.0, 0.0, 500.0, 500.0};
  MetersPerMinute uav_speed{20.0};
  MetersPerMinute ugv_max_speed{5.0};
  double consumption_rate{0.002};
  double k{1.0};
  Meters charging_distance{5.0};
  double reserve_factor{0.2};
  /// Starting energy as a fraction of the return trigger level, drawn uniformly.
  double energy_margin_lo{0.9}, energy_margin_hi{1.0};
};

/// One UGV and its UAVs placed uniformly in a cell; every UAV starts at or below its return
/// trigger, so all of them head for the UGV immediately.
inline ChargingScenario gen_charging(const ChargingGenConfig& c) {
  if (!c.cell.valid()) throw ValidationError("gen: charging cell must be non-empty");
  if ((1.0 + c.reserve_factor) * c.energy_margin_lo <= 1.0)
    throw ValidationError("gen: starting energy would not cover the flight back");
  Rng rng(derive_seed(c.seed, detail::kCharging));
  ChargingScenario s;
  s.id = "cell";
  s.ugv = c.placement == UgvPlacement::Corner ? Position{c.cell.x0, c.cell.y0, 0.0} : detail::draw_in(rng, c.cell);
  s.ugv_max_speed = c.ugv_max_speed;
  s.k = c.k;
  s.charging_distance = c.charging_distance;
  s.reserve_factor = c.reserve_factor;
  for (std::size_t i = 0; i < c.num_uavs; ++i) {
    ChargingUav u;
    u.id = "uav" + std::to_string(i);
    u.position = detail::draw_in(rng, c.cell);
    u.speed = c.uav_speed;
    u.consumption_rate = c.consumption_rate;
    const double d = std::max(planar_distance(s.ugv, u.position), c.charging_distance);
    u.energy = (1.0 + c.reserve_factor) * c.consumption_rate * d * rng.uniform(c.energy_margin_lo, c.energy_margin_hi);
    s.uavs.push_back(std::move(u));
  }
  return s;
}

/// All generated positions inside their declared bounds.
inline bool within_bounds(const FamtScenario& s, const GenConfig& c) {
  for (const auto& a : s.agents)
    if (!c.agent_region.contains(a.position)) return false;
  for (const auto& t : s.tasks) {
    if (!c.area.contains(t.position)) return false;
    if (c.distribution == Distribution::Compact && !c.agent_region.contains(t.position)) return false;
    if (c.distribution == Distribution::Scattered && c.agent_region.contains(t.position)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Latitude / longitude ingestion
// ---------------------------------------------------------------------------

inline constexpr double kEarthRadius = 6'371'000.0;

struct GeoRecord {
  double lat{0.0};
  double lon{0.0};
  std::optional<std::string> timestamp;
  std::optional<std::string> site_id;
};

/// Equirectangular projection about `reference`: x east, y north, h = 0.
inline std::vector<Position> ingest_geo(std::span<const GeoRecord> records, const GeoRecord& reference) {
  auto check = [](const GeoRecord& r, const std::string& where) {
    if (!std::isfinite(r.lat) || !std::isfinite(r.lon) || std::abs(r.lat) > 90.0 || std::abs(r.lon) > 180.0)
      throw ValidationError(where + ": coordinates out of range (lat " + std::to_string(r.lat) + ", lon " +
                            std::to_string(r.lon) + ")");
  };
  check(reference, "reference");
  constexpr double rad = std::numbers::pi / 180.0;
  const double cos_ref = std::cos(reference.lat * rad);
  std::vector<Position> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    check(records[i], "record " + std::to_string(i + 1));
    out.push_back({kEarthRadius * (records[i].lon - reference.lon) * rad * cos_ref,
                   kEarthRadius * (records[i].lat - reference.lat) * rad, 0.0});
  }
  return out;
}

/// Reads `lat,lon[,timestamp,site_id]` CSV with a header row. Errors name the file row.
inline std::vector<GeoRecord> read_geo_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(cell);
    }
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("geo csv: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "lat" || header[1] != "lon" ||
      (header.size() > 2 && header[2] != "timestamp") || (header.size() > 3 && header[3] != "site_id") ||
      header.size() > 4)
    throw ValidationError("geo csv: header must be lat,lon[,timestamp,site_id]");

  std::vector<GeoRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    const std::string where = "geo csv row " + std::to_string(row);
    if (cells.size() < 2 || cells.size() > header.size()) throw ValidationError(where + ": wrong number of fields");
    GeoRecord r;
    try {
      std::size_t used = 0;
      r.lat = std::stod(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("trailing");
      r.lon = std::stod(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ValidationError(where + ": latitude/longitude are not numbers");
    }
    if (!std::isfinite(r.lat) || !std::isfinite(r.lon) || std::abs(r.lat) > 90.0 || std::abs(r.lon) > 180.0)
      throw ValidationError(where + ": coordinates out of range");
    if (cells.size() > 2 && !cells[2].empty()) r.timestamp = cells[2];
    if (cells.size() > 3 && !cells[3].empty()) r.site_id = cells[3];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace agco
