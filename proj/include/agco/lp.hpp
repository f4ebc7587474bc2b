#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "agco/model.hpp"

namespace agco::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Constraint {
  std::vector<double> coeffs;  // dense, one per variable
  Sense sense{Sense::LessEqual};
  double rhs{0.0};
};

/// minimize objective . x  subject to constraints and lower <= x <= upper.
struct LinearProgram {
  std::size_t num_vars{0};
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower;  // empty means all zero
  std::vector<double> upper;  // empty means all +inf

  explicit LinearProgram(std::size_t n = 0)
      : num_vars(n), objective(n, 0.0), lower(n, 0.0), upper(n, std::numeric_limits<double>::infinity()) {}

  void add(std::vector<double> coeffs, Sense sense, double rhs) {
    if (coeffs.size() != num_vars) throw DimensionError("constraint width does not match variable count");
    constraints.push_back({std::move(coeffs), sense, rhs});
  }

  double evaluate(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < num_vars; ++j) v += objective[j] * x[j];
    return v;
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

struct Solution {
  Status status{Status::Infeasible};
  double objective{0.0};
  std::vector<double> x;
};

namespace detail {

constexpr double kEps = 1e-9;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    double* row = &a_[r * (cols_ + 1)];
    for (std::size_t j = 0; j <= cols_; ++j) row[j] /= p;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* other = &a_[i * (cols_ + 1)];
      const double f = other[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) other[j] -= f * row[j];
      other[c] = 0.0;
    }
    basis_[r] = c;
  }

  /// Runs primal simplex on the cost row. Columns with allowed[c] == false never enter.
  /// Returns false on unboundedness.
  bool optimize(const std::vector<bool>& allowed) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    for (std::size_t iter = 0; iter < 200'000; ++iter) {
      std::size_t enter = cols_;
      double most_negative = -kEps;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!allowed[c]) continue;
        const double d = cost(c);
        if (bland) {
          if (d < -kEps) {
            enter = c;
            break;
          }
        } else if (d < most_negative) {
          most_negative = d;
          enter = c;
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double coef = at(r, enter);
        if (coef <= kEps) continue;
        const double ratio = rhs(r) / coef;
        if (ratio < best_ratio - kEps || (ratio <= best_ratio + kEps && leave < rows_ && basis_[r] < basis_[leave])) {
          best_ratio = std::min(ratio, best_ratio);
          leave = r;
        }
      }
      if (leave == rows_) return false;
      degenerate_run = best_ratio <= kEps ? degenerate_run + 1 : 0;
      // Bland's rule once the walk stalls, which rules out cycling.
      if (degenerate_run > 50) bland = true;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Two-phase dense tableau simplex. Finite upper bounds become explicit rows.
inline Solution solve(const LinearProgram& lp) {
  using detail::kEps;
  const std::size_t n = lp.num_vars;
  if (lp.objective.size() != n) throw DimensionError("objective width does not match variable count");
  const std::vector<double> lower = lp.lower.empty() ? std::vector<double>(n, 0.0) : lp.lower;
  const std::vector<double> upper =
      lp.upper.empty() ? std::vector<double>(n, std::numeric_limits<double>::infinity()) : lp.upper;
  for (std::size_t j = 0; j < n; ++j)
    if (upper[j] < lower[j] - kEps) return {Status::Infeasible, 0.0, {}};

  // Substitute x = lower + y, y >= 0.
  struct Row {
    std::vector<double> coeffs;
    Sense sense;
    double rhs;
  };
  std::vector<Row> rows;
  for (const auto& c : lp.constraints) {
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift += c.coeffs[j] * lower[j];
    rows.push_back({c.coeffs, c.sense, c.rhs - shift});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(upper[j])) continue;
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    rows.push_back({std::move(e), Sense::LessEqual, upper[j] - lower[j]});
  }
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      for (double& v : r.coeffs) v = -v;
      r.rhs = -r.rhs;
      if (r.sense == Sense::LessEqual)
        r.sense = Sense::GreaterEqual;
      else if (r.sense == Sense::GreaterEqual)
        r.sense = Sense::LessEqual;
    }
  }

  std::size_t slack_count = 0, artificial_count = 0;
  for (const auto& r : rows) {
    if (r.sense != Sense::Equal) ++slack_count;
    if (r.sense != Sense::LessEqual) ++artificial_count;
  }
  const std::size_t m = rows.size();
  const std::size_t cols = n + slack_count + artificial_count;
  detail::Tableau t(m, cols);
  std::vector<bool> is_artificial(cols, false);
  std::size_t next_slack = n, next_art = n + slack_count;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = rows[i].coeffs[j];
    t.rhs(i) = rows[i].rhs;
    switch (rows[i].sense) {
      case Sense::LessEqual:
        t.at(i, next_slack) = 1.0;
        t.basis()[i] = next_slack++;
        break;
      case Sense::GreaterEqual:
        t.at(i, next_slack++) = -1.0;
        [[fallthrough]];
      case Sense::Equal:
        t.at(i, next_art) = 1.0;
        is_artificial[next_art] = true;
        t.basis()[i] = next_art++;
        break;
    }
  }

  // Phase 1: minimize the sum of artificials.
  if (artificial_count > 0) {
    for (std::size_t c = 0; c < cols; ++c) t.cost(c) = is_artificial[c] ? 1.0 : 0.0;
    t.rhs(m) = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[t.basis()[i]]) continue;
      for (std::size_t c = 0; c <= cols; ++c) t.at(m, c) -= t.at(i, c);
    }
    t.optimize(std::vector<bool>(cols, true));
    if (-t.rhs(m) > 1e-7) return {Status::Infeasible, 0.0, {}};
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[t.basis()[i]]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (is_artificial[c] || std::abs(t.at(i, c)) <= kEps) continue;
        t.pivot(i, c);
        break;
      }
    }
  }

  // Phase 2.
  std::vector<bool> allowed(cols, true);
  for (std::size_t c = 0; c < cols; ++c) allowed[c] = !is_artificial[c];
  for (std::size_t c = 0; c <= cols; ++c) t.cost(c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.cost(j) = lp.objective[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = t.basis()[i];
    const double cb = b < n ? lp.objective[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) t.at(m, c) -= cb * t.at(i, c);
  }
  if (!t.optimize(allowed)) return {Status::Unbounded, -std::numeric_limits<double>::infinity(), {}};

  Solution sol;
  sol.status = Status::Optimal;
  sol.x = lower;
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis()[i] < n) sol.x[t.basis()[i]] += t.rhs(i);
  sol.objective = lp.evaluate(sol.x);
  return sol;
}

// ---------------------------------------------------------------------------
// Branch and bound (all variables integer)
// ---------------------------------------------------------------------------

struct IlpOptions {
  std::size_t node_budget = 1'000'000;
  double prune_tolerance = 1e-9;
  double integrality_tolerance = 1e-6;
};

struct IlpResult {
  Status status{Status::Infeasible};
  double objective{0.0};
  std::vector<double> x;  // integral values
  std::size_t nodes{0};   // LP relaxations solved
  double root_bound{0.0};
  double gap{0.0};  // incumbent minus best open bound at exit
};

struct NodeBudgetExceeded : Error {
  NodeBudgetExceeded(const std::string& what, IlpResult best) : Error(what), incumbent(std::move(best)) {}
  IlpResult incumbent;
};

/// Best-first branch and bound over LP relaxations, branching on the most fractional variable.
inline IlpResult branch_and_bound(const LinearProgram& lp, const IlpOptions& options = {}) {
  struct Node {
    double bound;
    std::size_t id;
    std::vector<double> lower, upper;
    std::vector<double> x;
  };
  struct Worse {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };

  IlpResult result;
  LinearProgram work = lp;
  if (work.lower.empty()) work.lower.assign(lp.num_vars, 0.0);
  if (work.upper.empty()) work.upper.assign(lp.num_vars, std::numeric_limits<double>::infinity());
  // Integer variables tolerate integer-rounded bounds.
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    work.lower[j] = std::ceil(work.lower[j] - options.integrality_tolerance);
    if (std::isfinite(work.upper[j])) work.upper[j] = std::floor(work.upper[j] + options.integrality_tolerance);
  }

  std::priority_queue<Node, std::vector<Node>, Worse> open;
  std::size_t next_id = 0;
  double incumbent = std::numeric_limits<double>::infinity();

  auto relax = [&](std::vector<double> lower, std::vector<double> upper) {
    if (result.nodes >= options.node_budget) {
      double best_open = open.empty() ? incumbent : open.top().bound;
      result.gap = incumbent - best_open;
      result.objective = incumbent;
      result.status = std::isfinite(incumbent) ? Status::Optimal : Status::Infeasible;
      throw NodeBudgetExceeded("branch-and-bound node budget of " + std::to_string(options.node_budget) +
                                   " exhausted; gap " + std::to_string(result.gap),
                               result);
    }
    ++result.nodes;
    work.lower = lower;
    work.upper = upper;
    Solution s = solve(work);
    if (s.status == Status::Unbounded) throw Error("integer program has an unbounded relaxation");
    if (s.status != Status::Optimal) return;
    if (s.objective >= incumbent - options.prune_tolerance) return;
    open.push({s.objective, next_id++, std::move(lower), std::move(upper), std::move(s.x)});
  };

  relax(work.lower, work.upper);
  if (open.empty()) {
    result.status = Status::Infeasible;
    return result;
  }
  result.root_bound = open.top().bound;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - options.prune_tolerance) continue;

    std::size_t branch = lp.num_vars;
    double best_score = -1.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      const double frac = node.x[j] - std::floor(node.x[j]);
      if (frac <= options.integrality_tolerance || frac >= 1.0 - options.integrality_tolerance) continue;
      const double score = 0.5 - std::abs(frac - 0.5);
      if (score > best_score + 1e-12) {
        best_score = score;
        branch = j;
      }
    }
    if (branch == lp.num_vars) {
      std::vector<double> xi(node.x.size());
      for (std::size_t j = 0; j < xi.size(); ++j) xi[j] = std::round(node.x[j]);
      const double value = lp.evaluate(xi);
      if (value < incumbent) {
        incumbent = value;
        result.x = std::move(xi);
      }
      continue;
    }
    const double v = node.x[branch];
    auto down_upper = node.upper;
    down_upper[branch] = std::floor(v);
    relax(node.lower, std::move(down_upper));
    auto up_lower = node.lower;
    up_lower[branch] = std::ceil(v);
    relax(std::move(up_lower), node.upper);
  }

  if (!std::isfinite(incumbent)) {
    result.status = Status::Infeasible;
    return result;
  }
  result.status = Status::Optimal;
  result.objective = incumbent;
  result.gap = 0.0;
  const double scale = std::max(1.0, std::abs(incumbent));
  if (result.root_bound > incumbent + 1e-7 * scale)
    throw std::logic_error("branch and bound: relaxation bound exceeds the integer optimum");
  return result;
}

}  // namespace agco::lp
