#include "pathcut/scoring.hpp"

#include <chrono>
#include <cmath>

#include "pathcut/errors.hpp"
#include "pathcut/paths.hpp"

namespace pathcut {

std::string to_string(Scorer s) {
  switch (s) {
    case Scorer::kGat: return "gat";
    case Scorer::kDetour: return "detour";
    case Scorer::kConstant: return "constant";
  }
  return "constant";
}

Scorer parse_scorer(const std::string& s) {
  if (s == "gat") return Scorer::kGat;
  if (s == "detour") return Scorer::kDetour;
  if (s == "constant") return Scorer::kConstant;
  throw ConfigError("unknown scorer '" + s + "'");
}

NodeScore detour_margin_scores(const WeightedGraph& g, const EdgeMask& mask,
                               const PathQuery& q) {
  validate_query(g, q);
  const ShortestPathTree from_s = dijkstra(g, mask, q.source);
  const ShortestPathTree from_t = dijkstra(g, mask, q.target);
  const double target_len = path_length(g, q.target_path.nodes);
  const double scale = g.edge_count() > 0 ? g.mean_edge_weight() : 1.0;

  NodeScore scores(g.node_count(), 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double ds = from_s.dist[v];
    const double dt = from_t.dist[v];
    if (ds == kInfinity || dt == kInfinity) continue;
    const double margin = ds + dt - target_len;
    scores[v] = (margin <= 0 || lengths_tie(ds + dt, target_len))
                    ? 1.0
                    : std::exp(-margin / scale);
  }
  for (NodeId v : q.target_path.nodes) scores[v] = 1.0;
  return scores;
}

NodeScore constant_scores(const WeightedGraph& g) {
  return NodeScore(g.node_count(), 1.0);
}

NodeScore gat_scores(const WeightedGraph& g, const PathQuery& q,
                     const ModelWeights& w, double* feature_time_ms) {
  const auto start = std::chrono::steady_clock::now();
  FeatureMatrix features = assemble_features(g, q, w.feature_families());
  if (feature_time_ms) {
    *feature_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  }
  return gat_forward(g, features, w);
}

}  // namespace pathcut
