#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "agco/model.hpp"

namespace agco {

/// Largest stop count solved by the exact subset DP.
inline constexpr std::size_t kExactTourLimit = 15;

struct Tour {
  std::vector<std::size_t> order;  // indices into the stop list
  Meters length{0.0};
  bool exact{true};  // false when produced by the heuristic
};

/// Length of the open path start -> stops[order[0]] -> stops[order[1]] -> ...
inline Meters open_path_length(const Position& start, std::span<const Position> stops,
                               std::span<const std::size_t> order) {
  Meters len = 0.0;
  Position at = start;
  for (std::size_t i : order) {
    len += euclidean_distance(at, stops[i]);
    at = stops[i];
  }
  return len;
}

/// Sum of independent start-to-stop legs.
inline Meters star_length(const Position& start, std::span<const Position> stops) {
  Meters len = 0.0;
  for (const auto& s : stops) len += euclidean_distance(start, s);
  return len;
}

namespace detail {

inline bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

/// Nearest-neighbour construction followed by 2-opt segment reversals and single-stop
/// relocations until neither move improves the open path.
inline Tour heuristic_open_path(const Position& start, std::span<const Position> stops) {
  const std::size_t n = stops.size();
  Tour tour;
  tour.exact = false;
  if (n == 0) return tour;

  std::vector<bool> used(n, false);
  Position at = start;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = euclidean_distance(at, stops[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    tour.order.push_back(best);
    at = stops[best];
  }

  auto pos = [&](std::ptrdiff_t i) -> const Position& {
    return i < 0 ? start : stops[tour.order[static_cast<std::size_t>(i)]];
  };
  auto leg = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return euclidean_distance(pos(i), pos(j)); };
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  constexpr double kGain = 1e-10;

  bool improved = true;
  while (improved) {
    improved = false;
    // 2-opt: reverse order[i..k]; the tail end is free.
    for (std::ptrdiff_t i = 0; i < last && !improved; ++i) {
      for (std::ptrdiff_t k = i + 1; k <= last; ++k) {
        const double before = leg(i - 1, i) + (k < last ? leg(k, k + 1) : 0.0);
        const double after = leg(i - 1, k) + (k < last ? leg(i, k + 1) : 0.0);
        if (after < before - kGain) {
          std::reverse(tour.order.begin() + i, tour.order.begin() + k + 1);
          improved = true;
          break;
        }
      }
    }
    if (improved) continue;
    // Or-opt: move a single stop to another slot.
    for (std::ptrdiff_t i = 0; i <= last && !improved; ++i) {
      const double removed_gain =
          leg(i - 1, i) + (i < last ? leg(i, i + 1) : 0.0) - (i < last ? leg(i - 1, i + 1) : 0.0);
      std::vector<std::size_t> rest(tour.order);
      const std::size_t moved = rest[static_cast<std::size_t>(i)];
      rest.erase(rest.begin() + i);
      for (std::size_t slot = 0; slot <= rest.size(); ++slot) {
        if (slot == static_cast<std::size_t>(i)) continue;
        const Position& prev = slot == 0 ? start : stops[rest[slot - 1]];
        double insert_cost = euclidean_distance(prev, stops[moved]);
        if (slot < rest.size())
          insert_cost += euclidean_distance(stops[moved], stops[rest[slot]]) - euclidean_distance(prev, stops[rest[slot]]);
        if (insert_cost < removed_gain - kGain) {
          rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(slot), moved);
          tour.order = std::move(rest);
          improved = true;
          break;
        }
      }
    }
  }
  tour.length = open_path_length(start, stops, tour.order);
  return tour;
}

/// Minimum-length open path from `start` through every stop (no return leg).
///
/// Held-Karp over subsets for up to kExactTourLimit stops; ties resolve to the
/// lexicographically smallest visiting order. Larger inputs go to the heuristic and
/// come back with `exact == false`.
inline Tour shortest_open_path(const Position& start, std::span<const Position> stops) {
  const std::size_t n = stops.size();
  if (n == 0) return Tour{};
  if (n > kExactTourLimit) return heuristic_open_path(start, stops);

  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = euclidean_distance(stops[i], stops[j]);

  // rest[mask * n + last]: shortest completion after visiting `mask`, standing at `last`.
  const std::uint32_t full = (1u << n) - 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> rest(static_cast<std::size_t>(full + 1) * n, kInf);
  for (std::size_t last = 0; last < n; ++last) rest[static_cast<std::size_t>(full) * n + last] = 0.0;
  for (std::uint32_t mask = full; mask-- > 1;) {
    for (std::size_t last = 0; last < n; ++last) {
      if (!(mask & (1u << last))) continue;
      double best = kInf;
      for (std::size_t next = 0; next < n; ++next) {
        if (mask & (1u << next)) continue;
        best = std::min(best, dist[last * n + next] + rest[(mask | (1u << next)) * n + next]);
      }
      rest[static_cast<std::size_t>(mask) * n + last] = best;
    }
  }

  Tour tour;
  // Forward reconstruction picking the smallest index that stays on an optimal path.
  std::uint32_t mask = 0;
  std::size_t at_index = n;
  auto leg_to = [&](std::size_t next) {
    return at_index == n ? euclidean_distance(start, stops[next]) : dist[at_index * n + next];
  };
  for (std::size_t step = 0; step < n; ++step) {
    double step_best = kInf;
    for (std::size_t next = 0; next < n; ++next)
      if (!(mask & (1u << next))) step_best = std::min(step_best, leg_to(next) + rest[(mask | (1u << next)) * n + next]);
    for (std::size_t next = 0; next < n; ++next) {
      if (mask & (1u << next)) continue;
      if (detail::nearly_equal(leg_to(next) + rest[(mask | (1u << next)) * n + next], step_best)) {
        tour.order.push_back(next);
        mask |= 1u << next;
        at_index = next;
        break;
      }
    }
  }
  tour.length = open_path_length(start, stops, tour.order);
  return tour;
}

}  // namespace agco
