#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pathcut {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr EdgeId kNoEdge = -1;

// Relative tolerance used whenever two path lengths are compared for a tie.
inline constexpr double kLengthTolerance = 1e-9;

inline bool lengths_tie(double a, double b) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= kLengthTolerance * scale;
}

// Undirected edge. Stored with u < v.
struct Edge {
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  double weight = 1.0;  // path length contribution
  double cost = 1.0;    // removal price

  NodeId other(NodeId x) const { return x == u ? v : u; }
};

struct Incidence {
  NodeId neighbor;
  EdgeId edge;
};

// Immutable simple undirected graph with positive weights and costs.
// Adjacency lists are sorted by neighbor id, which every deterministic
// tie-break in the library relies on.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Collapses duplicate unordered pairs keeping the minimum-weight record
  // (first occurrence wins on equal weight). Throws ValidationError on
  // self-loops, out-of-range endpoints, and non-positive weight or cost.
  static WeightedGraph FromEdges(int node_count, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool contains(NodeId v) const { return v >= 0 && v < node_count_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const Incidence> neighbors(NodeId v) const {
    return {incidences_.data() + offsets_[v],
            incidences_.data() + offsets_[v + 1]};
  }
  int degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const;

  double mean_edge_weight() const;

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<Incidence> incidences_;
};

// Set of deleted edge indices. Grows on demand; indices beyond the current
// capacity are treated as not deleted.
class EdgeMask {
 public:
  EdgeMask() = default;
  explicit EdgeMask(int edge_count) : bits_(edge_count, 0) {}

  bool contains(EdgeId e) const {
    return e >= 0 && e < static_cast<EdgeId>(bits_.size()) && bits_[e] != 0;
  }
  void insert(EdgeId e);
  void erase(EdgeId e);
  void insert_all(std::span<const EdgeId> edges) {
    for (EdgeId e : edges) insert(e);
  }
  int size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::vector<EdgeId> indices() const;

 private:
  std::vector<char> bits_;
  int count_ = 0;
};

struct Path {
  std::vector<NodeId> nodes;
  double length = 0.0;

  int edge_count() const {
    return nodes.empty() ? 0 : static_cast<int>(nodes.size()) - 1;
  }
  bool empty() const { return nodes.empty(); }
  friend bool operator==(const Path& a, const Path& b) {
    return a.nodes == b.nodes;
  }
};

struct PathQuery {
  NodeId source = kNoNode;
  NodeId target = kNoNode;
  Path target_path;
};

// Sum of edge weights along `nodes`. Throws ValidationError for unknown node
// ids or consecutive pairs that are not edges.
double path_length(const WeightedGraph& g, std::span<const NodeId> nodes);
inline double path_length(const WeightedGraph& g, const Path& p) {
  return path_length(g, p.nodes);
}

// True iff every consecutive pair is an edge not in `mask`. Unknown node ids
// throw ValidationError.
bool is_path_valid(const WeightedGraph& g, const EdgeMask& mask,
                   const Path& p);

// Builds a Path with its length; throws ValidationError unless `nodes` is a
// simple path of g.
Path make_path(const WeightedGraph& g, std::vector<NodeId> nodes);

// Edge indices along the path, in order.
std::vector<EdgeId> path_edges(const WeightedGraph& g, const Path& p);

// Checks the PathQuery invariants against g.
void validate_query(const WeightedGraph& g, const PathQuery& q);

// Induced subgraph plus the id maps in both directions. Kept nodes are
// renumbered in increasing order, so relative node order (and therefore every
// lexicographic tie-break) is preserved.
struct Subgraph {
  WeightedGraph graph;
  std::vector<NodeId> to_full_node;
  std::vector<NodeId> to_sub_node;  // kNoNode when dropped
  std::vector<EdgeId> to_full_edge;
  std::vector<EdgeId> to_sub_edge;  // kNoEdge when dropped

  // Throws ValidationError if the query does not survive in the subgraph.
  PathQuery translate(const PathQuery& q) const;
  std::vector<EdgeId> edges_to_full(std::span<const EdgeId> sub_edges) const;
};

// Edges with both endpoints kept and not masked. Node ids outside the graph
// throw ValidationError.
Subgraph induced_subgraph(const WeightedGraph& g, std::span<const NodeId> keep,
                          const EdgeMask& mask);

}  // namespace pathcut
