#include "pathcut/paths.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <utility>

#include "pathcut/errors.hpp"

namespace pathcut {

PathSearch::PathSearch(const WeightedGraph& g)
    : g_(&g),
      dist_(g.node_count(), kInfinity),
      seen_(g.node_count(), 0),
      settled_(g.node_count(), 0),
      banned_node_(g.node_count(), 0),
      banned_edge_(g.edge_count(), 0) {}

void PathSearch::clear_bans() {
  if (++ban_id_ == 0) {
    std::fill(banned_node_.begin(), banned_node_.end(), 0);
    std::fill(banned_edge_.begin(), banned_edge_.end(), 0);
    ban_id_ = 1;
  }
}

void PathSearch::run(const EdgeMask& mask, NodeId root, NodeId stop_at) {
  if (!g_->contains(root)) {
    throw ValidationError("unknown node id " + std::to_string(root));
  }
  mask_ = &mask;
  root_ = root;
  if (++run_id_ == 0) {
    std::fill(seen_.begin(), seen_.end(), 0);
    std::fill(settled_.begin(), settled_.end(), 0);
    run_id_ = 1;
  }
  if (banned_node_[root] == ban_id_) return;

  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist_[root] = 0.0;
  seen_[root] = run_id_;
  heap.push({0.0, root});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (settled_[v] == run_id_ || d > dist_[v]) continue;
    settled_[v] = run_id_;
    if (v == stop_at) break;
    for (const Incidence& inc : g_->neighbors(v)) {
      if (!usable(inc)) continue;
      NodeId u = inc.neighbor;
      if (settled_[u] == run_id_) continue;
      double nd = d + g_->edge(inc.edge).weight;
      if (seen_[u] != run_id_ || nd < dist_[u]) {
        seen_[u] = run_id_;
        dist_[u] = nd;
        heap.push({nd, u});
      }
    }
  }
}

std::optional<Incidence> PathSearch::parent(NodeId v) const {
  if (!settled(v) || v == root_) return std::nullopt;
  for (const Incidence& inc : g_->neighbors(v)) {
    if (!usable(inc) || !settled(inc.neighbor)) continue;
    double via = dist_[inc.neighbor] + g_->edge(inc.edge).weight;
    if (lengths_tie(via, dist_[v])) return inc;
  }
  return std::nullopt;
}

int PathSearch::tight_parent_count(NodeId v, int cap) const {
  if (!settled(v) || v == root_) return 0;
  int count = 0;
  for (const Incidence& inc : g_->neighbors(v)) {
    if (!usable(inc) || !settled(inc.neighbor)) continue;
    double via = dist_[inc.neighbor] + g_->edge(inc.edge).weight;
    if (lengths_tie(via, dist_[v]) && ++count >= cap) break;
  }
  return count;
}

std::vector<NodeId> PathSearch::trace(NodeId from) const {
  std::vector<NodeId> nodes;
  if (!settled(from)) return nodes;
  nodes.push_back(from);
  NodeId v = from;
  while (v != root_) {
    auto p = parent(v);
    if (!p) {
      throw NumericError("shortest-path tree has no tight parent at node " +
                         std::to_string(v));
    }
    v = p->neighbor;
    nodes.push_back(v);
  }
  return nodes;
}

ShortestPathTree dijkstra(const WeightedGraph& g, const EdgeMask& mask,
                          NodeId source) {
  PathSearch search(g);
  search.run(mask, source);
  ShortestPathTree tree;
  tree.root = source;
  tree.dist.resize(g.node_count());
  tree.parent_edge.assign(g.node_count(), kNoEdge);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    tree.dist[v] = search.distance(v);
    if (auto p = search.parent(v)) tree.parent_edge[v] = p->edge;
  }
  return tree;
}

std::optional<Path> shortest_path(const WeightedGraph& g, const EdgeMask& mask,
                                  NodeId source, NodeId target) {
  if (!g.contains(source) || !g.contains(target)) {
    throw ValidationError("unknown source or target");
  }
  PathSearch search(g);
  search.run(mask, target, source);
  if (!search.settled(source)) return std::nullopt;
  Path p;
  p.nodes = search.trace(source);
  p.length = path_length(g, p.nodes);
  return p;
}

bool path_less(const Path& a, const Path& b) {
  if (!lengths_tie(a.length, b.length)) return a.length < b.length;
  return a.nodes < b.nodes;
}

std::vector<Path> k_shortest_paths(const WeightedGraph& g,
                                   const EdgeMask& mask, NodeId source,
                                   NodeId target, int k) {
  std::vector<Path> accepted;
  if (k < 1) return accepted;
  auto first = shortest_path(g, mask, source, target);
  if (!first) return accepted;
  accepted.push_back(std::move(*first));

  auto order = [](const Path& a, const Path& b) { return path_less(a, b); };
  std::set<Path, decltype(order)> candidates(order);
  std::set<std::vector<NodeId>> known{accepted.front().nodes};
  PathSearch search(g);

  while (static_cast<int>(accepted.size()) < k) {
    const std::vector<NodeId> prev = accepted.back().nodes;
    for (size_t i = 0; i + 1 < prev.size(); ++i) {
      const NodeId spur = prev[i];
      search.clear_bans();
      for (const Path& a : accepted) {
        if (a.nodes.size() > i + 1 &&
            std::equal(prev.begin(), prev.begin() + i + 1, a.nodes.begin())) {
          if (auto e = g.find_edge(a.nodes[i], a.nodes[i + 1])) {
            search.ban_edge(*e);
          }
        }
      }
      for (size_t j = 0; j < i; ++j) search.ban_node(prev[j]);

      search.run(mask, target, spur);
      if (!search.settled(spur)) continue;
      std::vector<NodeId> nodes(prev.begin(), prev.begin() + i);
      std::vector<NodeId> tail = search.trace(spur);
      nodes.insert(nodes.end(), tail.begin(), tail.end());
      if (!known.insert(nodes).second) continue;
      Path p;
      p.length = path_length(g, nodes);
      p.nodes = std::move(nodes);
      candidates.insert(std::move(p));
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

}  // namespace pathcut
