#include "pathcut/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "pathcut/errors.hpp"

namespace pathcut {
namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

void check_node(const WeightedGraph& g, NodeId v) {
  if (!g.contains(v)) {
    throw ValidationError("unknown node id " + std::to_string(v));
  }
}

}  // namespace

WeightedGraph WeightedGraph::FromEdges(int node_count, std::vector<Edge> edges) {
  if (node_count < 0) throw ValidationError("negative node count");
  WeightedGraph g;
  g.node_count_ = node_count;

  std::unordered_map<std::uint64_t, EdgeId> seen;
  seen.reserve(edges.size());
  for (Edge e : edges) {
    if (e.u < 0 || e.u >= node_count || e.v < 0 || e.v >= node_count) {
      throw ValidationError("edge (" + std::to_string(e.u) + ", " +
                            std::to_string(e.v) + ") references unknown node");
    }
    if (e.u == e.v) {
      throw ValidationError("self-loop on node " + std::to_string(e.u));
    }
    if (!(e.weight > 0) || !std::isfinite(e.weight)) {
      throw ValidationError("non-positive weight on edge (" +
                            std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ")");
    }
    if (!(e.cost > 0) || !std::isfinite(e.cost)) {
      throw ValidationError("non-positive cost on edge (" +
                            std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ")");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    auto [it, inserted] =
        seen.emplace(pair_key(e.u, e.v), static_cast<EdgeId>(g.edges_.size()));
    if (inserted) {
      g.edges_.push_back(e);
    } else if (e.weight < g.edges_[it->second].weight) {
      g.edges_[it->second] = e;
    }
  }

  std::vector<int> degree(node_count, 0);
  for (const Edge& e : g.edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  g.offsets_.assign(node_count + 1, 0);
  for (int v = 0; v < node_count; ++v) {
    g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  }
  g.incidences_.resize(2 * g.edges_.size());
  std::vector<int> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeId id = 0; id < static_cast<EdgeId>(g.edges_.size()); ++id) {
    const Edge& e = g.edges_[id];
    g.incidences_[fill[e.u]++] = {e.v, id};
    g.incidences_[fill[e.v]++] = {e.u, id};
  }
  for (int v = 0; v < node_count; ++v) {
    std::sort(g.incidences_.begin() + g.offsets_[v],
              g.incidences_.begin() + g.offsets_[v + 1],
              [](const Incidence& a, const Incidence& b) {
                return a.neighbor < b.neighbor;
              });
  }
  return g;
}

std::optional<EdgeId> WeightedGraph::find_edge(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v)) return std::nullopt;
  if (degree(u) > degree(v)) std::swap(u, v);
  auto adj = neighbors(u);
  auto it = std::lower_bound(
      adj.begin(), adj.end(), v,
      [](const Incidence& inc, NodeId x) { return inc.neighbor < x; });
  if (it == adj.end() || it->neighbor != v) return std::nullopt;
  return it->edge;
}

double WeightedGraph::mean_edge_weight() const {
  if (edges_.empty()) return 1.0;
  double sum = 0.0;
  for (const Edge& e : edges_) sum += e.weight;
  return sum / static_cast<double>(edges_.size());
}

void EdgeMask::insert(EdgeId e) {
  if (e < 0) return;
  if (e >= static_cast<EdgeId>(bits_.size())) bits_.resize(e + 1, 0);
  if (!bits_[e]) {
    bits_[e] = 1;
    ++count_;
  }
}

void EdgeMask::erase(EdgeId e) {
  if (contains(e)) {
    bits_[e] = 0;
    --count_;
  }
}

std::vector<EdgeId> EdgeMask::indices() const {
  std::vector<EdgeId> out;
  out.reserve(count_);
  for (EdgeId e = 0; e < static_cast<EdgeId>(bits_.size()); ++e) {
    if (bits_[e]) out.push_back(e);
  }
  return out;
}

double path_length(const WeightedGraph& g, std::span<const NodeId> nodes) {
  for (NodeId v : nodes) check_node(g, v);
  double length = 0.0;
  for (size_t i = 1; i < nodes.size(); ++i) {
    auto e = g.find_edge(nodes[i - 1], nodes[i]);
    if (!e) {
      throw ValidationError("no edge between " + std::to_string(nodes[i - 1]) +
                            " and " + std::to_string(nodes[i]));
    }
    length += g.edge(*e).weight;
  }
  return length;
}

bool is_path_valid(const WeightedGraph& g, const EdgeMask& mask,
                   const Path& p) {
  for (NodeId v : p.nodes) check_node(g, v);
  for (size_t i = 1; i < p.nodes.size(); ++i) {
    auto e = g.find_edge(p.nodes[i - 1], p.nodes[i]);
    if (!e || mask.contains(*e)) return false;
  }
  return true;
}

Path make_path(const WeightedGraph& g, std::vector<NodeId> nodes) {
  std::vector<NodeId> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("path repeats a node");
  }
  Path p;
  p.length = path_length(g, nodes);
  p.nodes = std::move(nodes);
  return p;
}

std::vector<EdgeId> path_edges(const WeightedGraph& g, const Path& p) {
  std::vector<EdgeId> out;
  out.reserve(p.edge_count());
  for (size_t i = 1; i < p.nodes.size(); ++i) {
    auto e = g.find_edge(p.nodes[i - 1], p.nodes[i]);
    if (!e) {
      throw ValidationError("no edge between " +
                            std::to_string(p.nodes[i - 1]) + " and " +
                            std::to_string(p.nodes[i]));
    }
    out.push_back(*e);
  }
  return out;
}

void validate_query(const WeightedGraph& g, const PathQuery& q) {
  check_node(g, q.source);
  check_node(g, q.target);
  if (q.source == q.target) {
    throw ValidationError("source and target coincide");
  }
  const auto& nodes = q.target_path.nodes;
  if (nodes.empty() || nodes.front() != q.source || nodes.back() != q.target) {
    throw ValidationError("target path must run from source to target");
  }
  Path rebuilt = make_path(g, nodes);
  if (!lengths_tie(rebuilt.length, q.target_path.length)) {
    throw ValidationError("target path length does not match its edges");
  }
}

PathQuery Subgraph::translate(const PathQuery& q) const {
  auto map = [&](NodeId v) {
    NodeId s = v >= 0 && v < static_cast<NodeId>(to_sub_node.size())
                   ? to_sub_node[v]
                   : kNoNode;
    if (s == kNoNode) {
      throw ValidationError("node " + std::to_string(v) +
                            " is not in the subgraph");
    }
    return s;
  };
  PathQuery out;
  out.source = map(q.source);
  out.target = map(q.target);
  out.target_path.nodes.reserve(q.target_path.nodes.size());
  for (NodeId v : q.target_path.nodes) out.target_path.nodes.push_back(map(v));
  out.target_path.length = path_length(graph, out.target_path.nodes);
  return out;
}

std::vector<EdgeId> Subgraph::edges_to_full(
    std::span<const EdgeId> sub_edges) const {
  std::vector<EdgeId> out;
  out.reserve(sub_edges.size());
  for (EdgeId e : sub_edges) out.push_back(to_full_edge.at(e));
  return out;
}

Subgraph induced_subgraph(const WeightedGraph& g, std::span<const NodeId> keep,
                          const EdgeMask& mask) {
  Subgraph sub;
  sub.to_sub_node.assign(g.node_count(), kNoNode);
  for (NodeId v : keep) {
    check_node(g, v);
    sub.to_sub_node[v] = 0;  // mark
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (sub.to_sub_node[v] != kNoNode) {
      sub.to_sub_node[v] = static_cast<NodeId>(sub.to_full_node.size());
      sub.to_full_node.push_back(v);
    }
  }
  std::vector<Edge> edges;
  sub.to_sub_edge.assign(g.edge_count(), kNoEdge);
  for (EdgeId id = 0; id < g.edge_count(); ++id) {
    const Edge& e = g.edge(id);
    if (mask.contains(id)) continue;
    NodeId su = sub.to_sub_node[e.u];
    NodeId sv = sub.to_sub_node[e.v];
    if (su == kNoNode || sv == kNoNode) continue;
    sub.to_sub_edge[id] = static_cast<EdgeId>(edges.size());
    sub.to_full_edge.push_back(id);
    edges.push_back({su, sv, e.weight, e.cost});
  }
  sub.graph = WeightedGraph::FromEdges(
      static_cast<int>(sub.to_full_node.size()), std::move(edges));
  return sub;
}

}  // namespace pathcut
