#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pathcut/attack.hpp"
#include "pathcut/gat.hpp"
#include "pathcut/graph.hpp"
#include "pathcut/scoring.hpp"

namespace pathcut {

struct GraspConfig {
  double start_percentile = 95.0;
  double decrement = 10.0;
  Scorer scorer = Scorer::kDetour;
  CoverBackend cover_backend = CoverBackend::kGreedy;
  bool strict = false;
  std::uint64_t seed = 0;
  std::optional<double> budget;

  // Throws ConfigError unless 0 < start <= 100 and 0 < decrement <= start.
  void validate() const;
  // start, start - decrement, ... while positive, then 0.
  std::vector<double> thresholds() const;
};

struct GraspIteration {
  double threshold = 0.0;
  int subgraph_nodes = 0;
  int subgraph_edges = 0;
  std::vector<EdgeId> cut_edges;  // full-graph indices, this iteration only
  double cut_cost = 0.0;
  int constraints_generated = 0;
  double pathattack_ms = 0.0;
  bool infeasible = false;  // subgraph attack hit the budget
  std::vector<EdgeId> cumulative_deleted;
  bool valid = false;  // checked on the full graph
};

struct GraspTrace {
  std::vector<GraspIteration> iterations;
};

struct GraspResult {
  // Cumulative deletions and totals; subproblem_* describe the last subgraph.
  AttackResult attack;
  GraspTrace trace;
  double final_threshold = 0.0;
  double scoring_time_ms = 0.0;  // feature assembly + inference, or heuristic
  double feature_time_ms = 0.0;  // feature assembly only (gat scorer)
};

// Nodes whose score reaches the percentile value, plus every p* node. The
// percentile value is the ascending-sorted score at index
// min(N - 1, floor(percentile * N / 100)); ties at it are kept.
std::vector<NodeId> select_nodes(const NodeScore& scores, double percentile,
                                 const PathQuery& q);

// Scores the nodes once with cfg.scorer (`weights` required for gat), then
// runs the thresholded loop. Throws InfeasibleError only when the attack on
// the whole remaining graph fails.
GraspResult grasp_attack(const WeightedGraph& g, const PathQuery& q,
                         const GraspConfig& cfg,
                         const ModelWeights* weights = nullptr);

// The loop alone, with precomputed scores.
GraspResult grasp_attack_with_scores(const WeightedGraph& g,
                                     const PathQuery& q,
                                     const GraspConfig& cfg,
                                     const NodeScore& scores);

// One JSON object per iteration.
void write_grasp_trace(const GraspTrace& trace, std::ostream& out);

}  // namespace pathcut
