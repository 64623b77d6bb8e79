#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pathcut/graph.hpp"

namespace pathcut {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ShortestPathTree {
  NodeId root = kNoNode;
  std::vector<double> dist;         // kInfinity when unreachable
  std::vector<EdgeId> parent_edge;  // kNoEdge for the root and unreachable
};

// Reusable Dijkstra state over one graph. Runs are O(settled) to reset, so a
// single instance can serve thousands of searches (Yen spurs, constraint
// generation, prune passes).
//
// Parents are resolved lazily with a fixed tie-break: among all neighbors u
// with dist[u] + w(u, v) == dist[v], the smallest u wins, then the smaller
// edge index. Following parents from any node toward the root therefore yields
// the lexicographically smallest shortest path from that node to the root.
class PathSearch {
 public:
  explicit PathSearch(const WeightedGraph& g);

  // Settles nodes outward from `root`, skipping masked or banned edges and
  // banned nodes. With `stop_at` set, stops right after that node is settled;
  // every node strictly closer than it is final by then.
  void run(const EdgeMask& mask, NodeId root, NodeId stop_at = kNoNode);

  bool settled(NodeId v) const { return settled_[v] == run_id_; }
  double distance(NodeId v) const { return settled(v) ? dist_[v] : kInfinity; }

  std::optional<Incidence> parent(NodeId v) const;
  // Number of tight parents of v, counting at most `cap`.
  int tight_parent_count(NodeId v, int cap = 2) const;
  // Nodes from `from` to the root along tie-broken parents; empty when `from`
  // was not settled.
  std::vector<NodeId> trace(NodeId from) const;

  void ban_node(NodeId v) { banned_node_[v] = ban_id_; }
  void ban_edge(EdgeId e) { banned_edge_[e] = ban_id_; }
  void clear_bans();

  const WeightedGraph& graph() const { return *g_; }

 private:
  bool usable(const Incidence& inc) const {
    return banned_node_[inc.neighbor] != ban_id_ &&
           banned_edge_[inc.edge] != ban_id_ && !mask_->contains(inc.edge);
  }

  const WeightedGraph* g_;
  const EdgeMask* mask_ = nullptr;
  NodeId root_ = kNoNode;
  std::vector<double> dist_;
  std::vector<std::uint32_t> seen_;
  std::vector<std::uint32_t> settled_;
  std::uint32_t run_id_ = 0;
  std::vector<std::uint32_t> banned_node_;
  std::vector<std::uint32_t> banned_edge_;
  std::uint32_t ban_id_ = 1;
};

// Exact single-source distances ignoring masked edges.
ShortestPathTree dijkstra(const WeightedGraph& g, const EdgeMask& mask,
                          NodeId source);

// The deterministic shortest path: lexicographically smallest node sequence
// among all shortest source-target paths. Absent when disconnected.
std::optional<Path> shortest_path(const WeightedGraph& g, const EdgeMask& mask,
                                  NodeId source, NodeId target);
inline std::optional<Path> shortest_path(const WeightedGraph& g,
                                         const EdgeMask& mask,
                                         const PathQuery& q) {
  return shortest_path(g, mask, q.source, q.target);
}

// Orders paths by length (ties within kLengthTolerance), then by node
// sequence.
bool path_less(const Path& a, const Path& b);

// Yen's k shortest loopless paths in path_less order. Returns fewer than k
// paths only when fewer exist.
std::vector<Path> k_shortest_paths(const WeightedGraph& g,
                                   const EdgeMask& mask, NodeId source,
                                   NodeId target, int k);

}  // namespace pathcut
