#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathcut/graph.hpp"
#include "pathcut/paths.hpp"
#include "pathcut/set_cover.hpp"

namespace pathcut {

enum class CoverBackend { kGreedy, kLp };

std::string to_string(CoverBackend b);
CoverBackend parse_cover_backend(const std::string& s);

struct AttackOptions {
  CoverBackend cover = CoverBackend::kGreedy;
  std::uint64_t seed = 0;
  // Also cut equal-length paths that lose the tie-break, so p* ends up the
  // unique shortest path.
  bool strict_unique = false;
  std::optional<double> budget;
  // Final pass restoring cut edges that are not needed.
  bool prune = true;
  int max_iterations = 1'000'000;
};

struct AttackResult {
  std::vector<EdgeId> cut_edges;  // sorted, indices of the attacked graph
  double total_cost = 0.0;
  bool valid = false;
  int pathattack_calls = 0;
  int constraints_generated = 0;
  double wall_time_ms = 0.0;
  int subproblem_nodes = 0;
  int subproblem_edges = 0;
};

// The path that currently keeps p* from being the deterministic shortest
// path, if any: the tie-broken shortest path when it differs from p*, or in
// strict mode an equal-length alternative branching off p*. `search` must be
// bound to the same graph.
std::optional<Path> find_competitor(PathSearch& search, const EdgeMask& mask,
                                    const PathQuery& q, bool strict_unique);

// True iff p* is the deterministic shortest path under `mask` (and the unique
// shortest path in strict mode).
bool is_target_shortest(const WeightedGraph& g, const EdgeMask& mask,
                        const PathQuery& q, bool strict_unique = false);

// Constraint generation: find a competing path, add it to the covering
// system, re-solve the cover from scratch, repeat until p* wins. Throws
// InfeasibleError when the budget cannot be met. `system_out` receives the
// final constraint system when given.
AttackResult pathattack(const WeightedGraph& g, const EdgeMask& mask,
                        const PathQuery& q, const AttackOptions& opts = {},
                        ConstraintSystem* system_out = nullptr);

// Cut the cheapest non-p* edge of the current competitor until none is left.
AttackResult baseline_greedy(const WeightedGraph& g, const EdgeMask& mask,
                             const PathQuery& q,
                             const AttackOptions& opts = {});

}  // namespace pathcut
