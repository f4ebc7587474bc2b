#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agco/charging.hpp"
#include "agco/famt.hpp"
#include "agco/maft.hpp"
#include "agco/model.hpp"

namespace agco::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct FormatError : Error {
  using Error::Error;
};

/// Shortest round-trip decimal text; identical output on every run.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) throw FormatError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline std::size_t count(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw FormatError(where + ": field '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

inline std::string text(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw FormatError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline void check_header(const json& j, const char* type) {
  if (!j.is_object()) throw FormatError("document must be a JSON object");
  if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion)
    throw FormatError("unsupported or missing schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  if (!j.contains("type") || j.at("type") != type) throw FormatError(std::string("expected document type '") + type + "'");
}

inline json header(const char* type) { return json{{"schema_version", kSchemaVersion}, {"type", type}}; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Model types
// ---------------------------------------------------------------------------

inline json to_json(const Position& p) { return {{"x", p.x}, {"y", p.y}, {"h", p.h}}; }

inline Position position_from_json(const json& j, const std::string& where) {
  return {detail::number(j, "x", where), detail::number(j, "y", where), j.contains("h") ? detail::number(j, "h", where) : 0.0};
}

inline json to_json(const CapabilityVector& c) { return c.levels(); }

inline CapabilityVector capabilities_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": capabilities must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw FormatError(where + ": capabilities must be an array of numbers");
    v.push_back(x.get<double>());
  }
  return CapabilityVector(std::move(v));
}

inline json to_json(const Agent& a) {
  json j{{"id", a.id},
         {"kind", to_string(a.kind)},
         {"position", to_json(a.position)},
         {"speed", a.speed},
         {"capabilities", to_json(a.capabilities)},
         {"task_limit", a.task_limit}};
  // JSON has no infinity: an unbounded budget is written as null.
  j["max_travel"] = std::isinf(a.max_travel) ? json(nullptr) : json(a.max_travel);
  return j;
}

inline Agent agent_from_json(const json& j, const std::string& where) {
  Agent a;
  a.id = detail::text(j, "id", where);
  const std::string w = where + " (" + a.id + ")";
  try {
    a.kind = agent_kind_from_string(detail::text(j, "kind", w));
  } catch (const ValidationError& e) {
    throw FormatError(w + ": " + e.what());
  }
  a.position = position_from_json(detail::field(j, "position", w), w);
  a.speed = detail::number(j, "speed", w);
  a.capabilities = capabilities_from_json(detail::field(j, "capabilities", w), w);
  a.task_limit = detail::count(j, "task_limit", w);
  if (j.contains("max_travel") && !j.at("max_travel").is_null()) a.max_travel = detail::number(j, "max_travel", w);
  return a;
}

inline json to_json(const Task& t) {
  return {{"id", t.id},
          {"position", to_json(t.position)},
          {"requirements", to_json(t.requirements)},
          {"max_agents", t.max_agents}};
}

inline Task task_from_json(const json& j, const std::string& where) {
  Task t;
  t.id = detail::text(j, "id", where);
  const std::string w = where + " (" + t.id + ")";
  t.position = position_from_json(detail::field(j, "position", w), w);
  t.requirements = capabilities_from_json(detail::field(j, "requirements", w), w);
  t.max_agents = detail::count(j, "max_agents", w);
  return t;
}

inline json to_json(const FamtScenario& s) {
  json j = detail::header("famt_scenario");
  j["agents"] = json::array();
  for (const auto& a : s.agents) j["agents"].push_back(to_json(a));
  j["tasks"] = json::array();
  for (const auto& t : s.tasks) j["tasks"].push_back(to_json(t));
  return j;
}

/// Parses and validates a scenario document.
inline FamtScenario famt_scenario_from_json(const json& j) {
  detail::check_header(j, "famt_scenario");
  FamtScenario s;
  std::size_t i = 0;
  for (const auto& a : detail::field(j, "agents", "scenario")) s.agents.push_back(agent_from_json(a, "agent " + std::to_string(i++)));
  i = 0;
  for (const auto& t : detail::field(j, "tasks", "scenario")) s.tasks.push_back(task_from_json(t, "task " + std::to_string(i++)));
  validate(s);
  return s;
}

inline json to_json(const Region& r) {
  return {{"id", r.id},
          {"position", to_json(r.position)},
          {"uav_count", r.uav_count},
          {"ugv_count", r.ugv_count},
          {"uav_speed", r.uav_speed},
          {"ugv_speed", r.ugv_speed},
          {"uav_capabilities", to_json(r.uav_capabilities)},
          {"ugv_capabilities", to_json(r.ugv_capabilities)}};
}

inline Region region_from_json(const json& j, const std::string& where) {
  Region r;
  r.id = detail::text(j, "id", where);
  const std::string w = where + " (" + r.id + ")";
  r.position = position_from_json(detail::field(j, "position", w), w);
  r.uav_count = detail::count(j, "uav_count", w);
  r.ugv_count = detail::count(j, "ugv_count", w);
  r.uav_speed = detail::number(j, "uav_speed", w);
  r.ugv_speed = detail::number(j, "ugv_speed", w);
  r.uav_capabilities = capabilities_from_json(detail::field(j, "uav_capabilities", w), w);
  r.ugv_capabilities = capabilities_from_json(detail::field(j, "ugv_capabilities", w), w);
  return r;
}

inline json to_json(const MaftInstance& inst) {
  json j = detail::header("maft_scenario");
  j["regions"] = json::array();
  for (const auto& r : inst.regions()) j["regions"].push_back(to_json(r));
  j["tasks"] = json::array();
  for (const auto& t : inst.tasks()) j["tasks"].push_back(to_json(t));
  const auto& f = inst.feasibility();
  j["feasible"] = f.feasible;
  return j;
}

inline MaftInstance maft_instance_from_json(const json& j) {
  detail::check_header(j, "maft_scenario");
  std::vector<Region> regions;
  std::vector<Task> tasks;
  std::size_t i = 0;
  for (const auto& r : detail::field(j, "regions", "scenario")) regions.push_back(region_from_json(r, "region " + std::to_string(i++)));
  i = 0;
  for (const auto& t : detail::field(j, "tasks", "scenario")) tasks.push_back(task_from_json(t, "task " + std::to_string(i++)));
  return MaftInstance(std::move(regions), std::move(tasks));
}

inline json to_json(const ChargingScenario& s) {
  json j = detail::header("charging_scenario");
  j["id"] = s.id;
  j["ugv"] = to_json(s.ugv);
  j["ugv_max_speed"] = s.ugv_max_speed;
  j["k"] = s.k;
  j["charging_distance"] = s.charging_distance;
  j["reserve_factor"] = s.reserve_factor;
  j["uavs"] = json::array();
  for (const auto& u : s.uavs)
    j["uavs"].push_back({{"id", u.id},
                         {"position", to_json(u.position)},
                         {"speed", u.speed},
                         {"energy", u.energy},
                         {"consumption_rate", u.consumption_rate},
                         {"task_drain", u.task_drain}});
  return j;
}

inline ChargingScenario charging_scenario_from_json(const json& j) {
  detail::check_header(j, "charging_scenario");
  ChargingScenario s;
  s.id = j.value("id", std::string{});
  s.ugv = position_from_json(detail::field(j, "ugv", "scenario"), "ugv");
  s.ugv_max_speed = detail::number(j, "ugv_max_speed", "scenario");
  s.k = detail::number(j, "k", "scenario");
  s.charging_distance = detail::number(j, "charging_distance", "scenario");
  s.reserve_factor = detail::number(j, "reserve_factor", "scenario");
  std::size_t i = 0;
  for (const auto& u : detail::field(j, "uavs", "scenario")) {
    const std::string w = "uav " + std::to_string(i++);
    ChargingUav v;
    v.id = detail::text(u, "id", w);
    v.position = position_from_json(detail::field(u, "position", w), w);
    v.speed = detail::number(u, "speed", w);
    v.energy = detail::number(u, "energy", w);
    v.consumption_rate = detail::number(u, "consumption_rate", w);
    if (u.contains("task_drain")) v.task_drain = detail::number(u, "task_drain", w);
    s.uavs.push_back(std::move(v));
  }
  validate(s);
  return s;
}

/// Hash of the canonical serialization; equal scenarios hash equal.
template <class Scenario>
std::string scenario_hash(const Scenario& s) {
  return hex64(fnv1a(to_json(s).dump()));
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

inline json to_json(const FamtAssignment& a, const FamtScenario& s) {
  json j = detail::header("famt_assignment");
  j["algorithm"] = a.algorithm;
  j["plans"] = json::array();
  for (const auto& p : a.plans) {
    json ids = json::array();
    for (std::size_t t : p.tasks) ids.push_back(s.tasks.at(t).id);
    j["plans"].push_back({{"agent", p.agent_id}, {"tasks", ids}, {"distance", p.distance}});
  }
  j["tasks_completed"] = a.tasks_completed;
  j["total_distance"] = a.total_distance;
  j["count_certified"] = a.count_certified;
  return j;
}

/// Structural check of an assignment document; returns the problems found.
inline std::vector<std::string> check_famt_assignment_json(const json& j) {
  std::vector<std::string> problems;
  auto need = [&](const json& obj, const char* key, bool (json::*pred)() const noexcept, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
      problems.push_back(where + ": missing '" + key + "'");
    else if (!(obj.at(key).*pred)())
      problems.push_back(where + ": '" + key + "' has the wrong type");
  };
  if (!j.is_object()) return {"document is not an object"};
  if (j.value("schema_version", -1) != kSchemaVersion) problems.push_back("schema_version mismatch");
  if (j.value("type", std::string{}) != "famt_assignment") problems.push_back("type is not famt_assignment");
  need(j, "algorithm", &json::is_string, "root");
  need(j, "plans", &json::is_array, "root");
  need(j, "tasks_completed", &json::is_number_unsigned, "root");
  need(j, "total_distance", &json::is_number, "root");
  need(j, "count_certified", &json::is_boolean, "root");
  if (j.contains("plans") && j["plans"].is_array()) {
    std::size_t i = 0;
    for (const auto& p : j["plans"]) {
      const std::string w = "plan " + std::to_string(i++);
      need(p, "agent", &json::is_string, w);
      need(p, "tasks", &json::is_array, w);
      need(p, "distance", &json::is_number, w);
      if (p.contains("tasks") && p["tasks"].is_array())
        for (const auto& t : p["tasks"])
          if (!t.is_string()) problems.push_back(w + ": task ids must be strings");
    }
  }
  return problems;
}

inline json to_json(const MaftAssignment& a, const MaftInstance& inst) {
  json j = detail::header("maft_assignment");
  j["algorithm"] = a.algorithm;
  j["x"] = json::array();
  for (const auto& x : a.x)
    j["x"].push_back({{"region", inst.regions().at(x.region).id},
                      {"kind", to_string(x.kind)},
                      {"task", inst.tasks().at(x.task).id},
                      {"count", x.count}});
  j["raw_distance"] = a.raw_distance;
  j["raw_time"] = a.raw_time;
  j["objective"] = a.objective;
  j["weights"] = {{"k_t", a.weights.k_t}, {"k_d", a.weights.k_d}};
  j["bounds"] = {{"d_min", a.bounds.d_min}, {"d_max", a.bounds.d_max}, {"t_min", a.bounds.t_min}, {"t_max", a.bounds.t_max}};
  j["nodes"] = a.nodes;
  j["gap"] = a.gap;
  return j;
}

inline json to_json(const SimResult& r, const ChargingScenario& s) {
  json j = detail::header("charging_result");
  j["algorithm"] = r.algorithm;
  j["scenario"] = s.id;
  j["uavs"] = json::array();
  for (std::size_t i = 0; i < s.uavs.size(); ++i)
    j["uavs"].push_back({{"id", s.uavs[i].id},
                         {"distance", r.uav_distance[i]},
                         {"charge_time", r.charge_time[i] ? json(*r.charge_time[i]) : json(nullptr)},
                         {"final_energy", r.final_energy[i]},
                         {"state", to_string(r.final_state[i])}});
  j["ugv_distance"] = r.ugv_distance;
  j["total_distance"] = r.total_distance;
  j["time_to_last_charge"] = r.time_to_last_charge;
  j["complete"] = r.complete;
  j["steps"] = r.steps;
  return j;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Quotes a cell when it contains a delimiter, quote or newline.
inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
  out << '\n';
}

inline const std::vector<std::string>& famt_summary_header() {
  static const std::vector<std::string> h{"scenario_id", "algorithm", "M", "N", "q", "p", "tasks_completed", "total_distance",
                                          "runtime_ms"};
  return h;
}

/// q and p are reported as the maxima over agents and tasks.
inline std::vector<std::string> famt_summary_row(const std::string& scenario_id, const FamtScenario& s,
                                                 const FamtAssignment& a, double runtime_ms) {
  std::size_t q = 0, p = 0;
  for (const auto& ag : s.agents) q = std::max(q, ag.task_limit);
  for (const auto& t : s.tasks) p = std::max(p, t.max_agents);
  return {scenario_id,
          a.algorithm,
          std::to_string(s.agents.size()),
          std::to_string(s.tasks.size()),
          std::to_string(q),
          std::to_string(p),
          std::to_string(a.tasks_completed),
          format_number(a.total_distance),
          format_number(runtime_ms)};
}

inline void write_sweep_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
  write_csv_row(out, {"k_t", "k_d", "time", "distance", "pareto_flag"});
  for (const auto& p : points)
    write_csv_row(out, {format_number(p.k_t), format_number(p.k_d), p.error.empty() ? format_number(p.time) : "",
                        p.error.empty() ? format_number(p.distance) : "", p.pareto ? "1" : "0"});
}

inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples) {
  write_csv_row(out, {"t", "entity", "x", "y", "energy", "state"});
  for (const auto& s : samples)
    write_csv_row(out, {format_number(s.t), s.entity, format_number(s.x), format_number(s.y),
                        std::isnan(s.energy) ? "" : format_number(s.energy), s.state});
}

}  // namespace agco::io
