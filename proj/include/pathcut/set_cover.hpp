#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pathcut/graph.hpp"

namespace pathcut {

// Weighted set cover over graph edges: each constraint is the edge set of a
// competing path minus the target path, and must be hit by at least one cut
// edge. Logically this is the (2|E| + |P| + 1) x |E| covering LP: two bound
// rows per variable, one row per path, and the optional budget row.
class ConstraintSystem {
 public:
  ConstraintSystem() = default;
  // One variable per edge of g outside `protected_edges`, priced at its cost.
  ConstraintSystem(const WeightedGraph& g,
                   std::span<const EdgeId> protected_edges);
  // Variables indexed by position in `edge_costs`.
  explicit ConstraintSystem(std::vector<double> edge_costs,
                            std::span<const EdgeId> protected_edges = {});

  // Sorts and deduplicates. Throws InfeasibleError for an empty set and
  // ValidationError for protected or unknown edges.
  void add_constraint(std::vector<EdgeId> edges);

  const std::vector<std::vector<EdgeId>>& constraints() const {
    return constraints_;
  }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  int edge_count() const { return static_cast<int>(costs_.size()); }
  int variable_count() const { return variable_count_; }
  bool is_variable(EdgeId e) const {
    return e >= 0 && e < edge_count() && !protected_[e];
  }
  double cost(EdgeId e) const { return costs_[e]; }

  std::optional<double> budget() const { return budget_; }
  void set_budget(std::optional<double> b) { budget_ = b; }

  int matrix_rows() const {
    return 2 * variable_count_ + constraint_count() + (budget_ ? 1 : 0);
  }
  int matrix_cols() const { return variable_count_; }

  bool covers(std::span<const EdgeId> chosen) const;
  // Indices of constraints not hit by `chosen`.
  std::vector<int> uncovered(std::span<const EdgeId> chosen) const;
  double total_cost(std::span<const EdgeId> chosen) const;

  // CPLEX-LP text: objective, one row per constraint path, the budget row when
  // set, and [0, 1] bounds for every variable. Variables are named x<edge>.
  void write_lp(std::ostream& out) const;

 private:
  std::vector<double> costs_;
  std::vector<char> protected_;
  int variable_count_ = 0;
  std::vector<std::vector<EdgeId>> constraints_;
  std::optional<double> budget_;
};

// Repeatedly takes the edge with the most newly covered constraints per unit
// cost (ties: smaller edge index). Cost is within H(|P|) of optimal.
std::vector<EdgeId> greedy_set_cover(const ConstraintSystem& cs);

struct LpRelaxation {
  double objective = 0.0;
  std::vector<double> values;  // x_e per edge index; 0 for unused edges
};

// Optimal fractional cover. Solved through its packing dual so the initial
// basis is feasible; x is read off the dual prices.
LpRelaxation solve_cover_lp(const ConstraintSystem& cs);

struct RoundingOptions {
  int max_trials = 100;
};

struct CoverSolution {
  std::vector<EdgeId> edges;  // sorted
  double cost = 0.0;
  double lp_objective = 0.0;
  int trials = 0;       // rounding trials drawn
  bool repaired = false;  // greedy repair was needed
};

// LP relaxation, then independent randomized rounding with probability
// min(1, x_e * ln(2|P|)) until a trial covers everything (at most
// `max_trials`), greedy repair of anything left, and a prune of redundant
// edges in decreasing cost order.
CoverSolution lp_cover_round(const ConstraintSystem& cs, std::uint64_t seed,
                             const RoundingOptions& opts = {});

// Drops edges whose constraints are all covered by other chosen edges,
// visiting the most expensive first (ties: smaller index first).
std::vector<EdgeId> prune_cover(const ConstraintSystem& cs,
                                std::vector<EdgeId> chosen);

}  // namespace pathcut
