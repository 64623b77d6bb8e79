#include "pathcut/grasp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "pathcut/errors.hpp"
#include "pathcut/paths.hpp"

namespace pathcut {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

}  // namespace

void GraspConfig::validate() const {
  if (!(start_percentile > 0 && start_percentile <= 100)) {
    throw ConfigError("start percentile must be in (0, 100]");
  }
  if (!(decrement > 0 && decrement <= start_percentile)) {
    throw ConfigError("decrement must be in (0, start percentile]");
  }
}

std::vector<double> GraspConfig::thresholds() const {
  validate();
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double t = start_percentile - i * decrement;
    if (t <= 1e-9) break;
    out.push_back(t);
  }
  out.push_back(0.0);
  return out;
}

std::vector<NodeId> select_nodes(const NodeScore& scores, double percentile,
                                 const PathQuery& q) {
  const int n = static_cast<int>(scores.size());
  std::vector<char> keep(n, 0);
  if (n > 0) {
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    const double p = std::clamp(percentile, 0.0, 100.0);
    const int rank = std::min(n - 1, static_cast<int>(std::floor(p * n / 100.0)));
    const double cut = sorted[rank];
    for (int v = 0; v < n; ++v) {
      if (scores[v] >= cut) keep[v] = 1;
    }
  }
  for (NodeId v : q.target_path.nodes) {
    if (v >= 0 && v < n) keep[v] = 1;
  }
  if (q.source >= 0 && q.source < n) keep[q.source] = 1;
  if (q.target >= 0 && q.target < n) keep[q.target] = 1;
  std::vector<NodeId> out;
  for (int v = 0; v < n; ++v) {
    if (keep[v]) out.push_back(v);
  }
  return out;
}

GraspResult grasp_attack(const WeightedGraph& g, const PathQuery& q,
                         const GraspConfig& cfg, const ModelWeights* weights) {
  const auto start = Clock::now();
  cfg.validate();
  NodeScore scores;
  double feature_ms = 0.0;
  switch (cfg.scorer) {
    case Scorer::kConstant:
      scores = constant_scores(g);
      break;
    case Scorer::kDetour:
      scores = detour_margin_scores(g, EdgeMask(), q);
      break;
    case Scorer::kGat:
      if (!weights) throw ConfigError("gat scorer needs a weight file");
      scores = gat_scores(g, q, *weights, &feature_ms);
      break;
  }
  const double scoring_ms = elapsed_ms(start);
  GraspResult r = grasp_attack_with_scores(g, q, cfg, scores);
  r.scoring_time_ms = scoring_ms;
  r.feature_time_ms = feature_ms;
  r.attack.wall_time_ms += scoring_ms;
  return r;
}

GraspResult grasp_attack_with_scores(const WeightedGraph& g,
                                     const PathQuery& q,
                                     const GraspConfig& cfg,
                                     const NodeScore& scores) {
  const auto start = Clock::now();
  validate_query(g, q);
  if (static_cast<int>(scores.size()) != g.node_count()) {
    throw ValidationError("score vector length does not match node count");
  }
  const std::vector<double> schedule = cfg.thresholds();

  GraspResult r;
  EdgeMask deleted(g.edge_count());
  double spent = 0.0;
  PathSearch full_search(g);
  std::vector<NodeId> previous;
  bool have_previous = false;

  AttackOptions opts;
  opts.cover = cfg.cover_backend;
  opts.seed = cfg.seed;
  opts.strict_unique = cfg.strict;

  for (double t : schedule) {
    const bool last = t == 0.0;
    std::vector<NodeId> keep = select_nodes(scores, t, q);
    // Same node set as the last attempt: the subproblem is unchanged.
    if (have_previous && keep == previous && !last) continue;
    previous = keep;
    have_previous = true;

    Subgraph sub = induced_subgraph(g, keep, deleted);
    const PathQuery sq = sub.translate(q);
    if (cfg.budget) opts.budget = *cfg.budget - spent;

    GraspIteration it;
    it.threshold = t;
    it.subgraph_nodes = sub.graph.node_count();
    it.subgraph_edges = sub.graph.edge_count();
    r.final_threshold = t;
    r.attack.subproblem_nodes = it.subgraph_nodes;
    r.attack.subproblem_edges = it.subgraph_edges;
    ++r.attack.pathattack_calls;

    try {
      AttackResult sr = pathattack(sub.graph, EdgeMask(), sq, opts);
      it.cut_edges = sub.edges_to_full(sr.cut_edges);
      it.cut_cost = sr.total_cost;
      it.constraints_generated = sr.constraints_generated;
      it.pathattack_ms = sr.wall_time_ms;
    } catch (const InfeasibleError&) {
      if (last) throw;
      it.infeasible = true;
    }
    r.attack.constraints_generated += it.constraints_generated;
    for (EdgeId e : it.cut_edges) {
      deleted.insert(e);
      spent += g.edge(e).cost;
    }
    it.cumulative_deleted = deleted.indices();
    it.valid = !find_competitor(full_search, deleted, q, cfg.strict);
    r.trace.iterations.push_back(it);
    if (it.valid) break;
  }

  r.attack.cut_edges = deleted.indices();
  r.attack.total_cost = 0.0;
  for (EdgeId e : r.attack.cut_edges) r.attack.total_cost += g.edge(e).cost;
  r.attack.valid =
      !r.trace.iterations.empty() && r.trace.iterations.back().valid;
  r.attack.wall_time_ms = elapsed_ms(start);
  return r;
}

void write_grasp_trace(const GraspTrace& trace, std::ostream& out) {
  for (size_t i = 0; i < trace.iterations.size(); ++i) {
    const GraspIteration& it = trace.iterations[i];
    nlohmann::json j{{"iteration", i},
                     {"threshold", it.threshold},
                     {"subgraph_nodes", it.subgraph_nodes},
                     {"subgraph_edges", it.subgraph_edges},
                     {"cut_edges", it.cut_edges},
                     {"cut_cost", it.cut_cost},
                     {"constraints_generated", it.constraints_generated},
                     {"pathattack_ms", it.pathattack_ms},
                     {"infeasible", it.infeasible},
                     {"cumulative_deleted", it.cumulative_deleted},
                     {"valid", it.valid}};
    out << j.dump() << "\n";
  }
}

}  // namespace pathcut
