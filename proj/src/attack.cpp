#include "pathcut/attack.hpp"

#include <algorithm>
#include <chrono>

#include "pathcut/errors.hpp"

namespace pathcut {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void check_preconditions(const WeightedGraph& g, const EdgeMask& mask,
                         const PathQuery& q) {
  validate_query(g, q);
  if (!is_path_valid(g, mask, q.target_path)) {
    throw ValidationError("target path uses a deleted edge");
  }
}

std::vector<char> edge_flags(const WeightedGraph& g,
                             const std::vector<EdgeId>& edges) {
  std::vector<char> flags(g.edge_count(), 0);
  for (EdgeId e : edges) flags[e] = 1;
  return flags;
}

std::vector<EdgeId> off_target_edges(const WeightedGraph& g, const Path& p,
                                     const std::vector<char>& on_target) {
  std::vector<EdgeId> out;
  for (EdgeId e : path_edges(g, p)) {
    if (!on_target[e]) out.push_back(e);
  }
  return out;
}

}  // namespace

std::string to_string(CoverBackend b) {
  return b == CoverBackend::kLp ? "lp" : "greedy";
}

CoverBackend parse_cover_backend(const std::string& s) {
  if (s == "greedy") return CoverBackend::kGreedy;
  if (s == "lp") return CoverBackend::kLp;
  throw ConfigError("unknown cover backend '" + s + "'");
}

std::optional<Path> find_competitor(PathSearch& search, const EdgeMask& mask,
                                    const PathQuery& q, bool strict_unique) {
  const WeightedGraph& g = search.graph();
  search.clear_bans();
  search.run(mask, q.target, q.source);
  if (!search.settled(q.source)) {
    throw ValidationError("source cannot reach target under the mask");
  }
  std::vector<NodeId> best = search.trace(q.source);
  if (best != q.target_path.nodes) {
    Path p;
    p.length = path_length(g, best);
    p.nodes = std::move(best);
    return p;
  }
  if (!strict_unique) return std::nullopt;

  // p* is the tie-break winner; look for an equal-length branch off it.
  const auto& nodes = q.target_path.nodes;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    if (search.tight_parent_count(v, 2) < 2) continue;
    for (const Incidence& inc : g.neighbors(v)) {
      if (inc.neighbor == nodes[i + 1] || mask.contains(inc.edge) ||
          !search.settled(inc.neighbor)) {
        continue;
      }
      double via = search.distance(inc.neighbor) + g.edge(inc.edge).weight;
      if (!lengths_tie(via, search.distance(v))) continue;
      std::vector<NodeId> alt(nodes.begin(), nodes.begin() + i + 1);
      std::vector<NodeId> tail = search.trace(inc.neighbor);
      alt.insert(alt.end(), tail.begin(), tail.end());
      Path p;
      p.length = path_length(g, alt);
      p.nodes = std::move(alt);
      return p;
    }
  }
  return std::nullopt;
}

bool is_target_shortest(const WeightedGraph& g, const EdgeMask& mask,
                        const PathQuery& q, bool strict_unique) {
  if (!is_path_valid(g, mask, q.target_path)) return false;
  PathSearch search(g);
  return !find_competitor(search, mask, q, strict_unique).has_value();
}

AttackResult pathattack(const WeightedGraph& g, const EdgeMask& mask,
                        const PathQuery& q, const AttackOptions& opts,
                        ConstraintSystem* system_out) {
  const auto start = Clock::now();
  check_preconditions(g, mask, q);

  const std::vector<EdgeId> target_edges = path_edges(g, q.target_path);
  const std::vector<char> on_target = edge_flags(g, target_edges);
  ConstraintSystem cs(g, target_edges);
  cs.set_budget(opts.budget);

  EdgeMask work = mask;
  std::vector<EdgeId> cut;
  PathSearch search(g);
  int iterations = 0;
  while (auto competitor = find_competitor(search, work, q, opts.strict_unique)) {
    if (++iterations > opts.max_iterations) {
      throw Error("constraint generation exceeded iteration limit");
    }
    std::vector<EdgeId> row = off_target_edges(g, *competitor, on_target);
    if (row.empty()) {
      throw InfeasibleError("competing path uses only target-path edges",
                            competitor->nodes);
    }
    cs.add_constraint(std::move(row));

    for (EdgeId e : cut) work.erase(e);
    if (opts.cover == CoverBackend::kLp) {
      cut = lp_cover_round(cs, opts.seed).edges;
    } else {
      cut = greedy_set_cover(cs);
    }
    if (opts.budget && cs.total_cost(cut) > *opts.budget + 1e-9) {
      throw InfeasibleError("no cut within budget", competitor->nodes);
    }
    work.insert_all(cut);
  }

  if (opts.prune && !cut.empty()) {
    std::vector<EdgeId> order = cut;
    std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
      return g.edge(a).cost > g.edge(b).cost;
    });
    for (EdgeId e : order) {
      work.erase(e);
      if (find_competitor(search, work, q, opts.strict_unique)) {
        work.insert(e);
      } else {
        cut.erase(std::find(cut.begin(), cut.end(), e));
      }
    }
  }

  AttackResult result;
  std::sort(cut.begin(), cut.end());
  result.cut_edges = std::move(cut);
  result.total_cost = cs.total_cost(result.cut_edges);
  result.valid = !find_competitor(search, work, q, opts.strict_unique);
  result.pathattack_calls = 1;
  result.constraints_generated = cs.constraint_count();
  result.subproblem_nodes = g.node_count();
  result.subproblem_edges = g.edge_count();
  result.wall_time_ms = elapsed_ms(start);
  if (system_out) *system_out = std::move(cs);
  return result;
}

AttackResult baseline_greedy(const WeightedGraph& g, const EdgeMask& mask,
                             const PathQuery& q, const AttackOptions& opts) {
  const auto start = Clock::now();
  check_preconditions(g, mask, q);
  const std::vector<char> on_target =
      edge_flags(g, path_edges(g, q.target_path));

  EdgeMask work = mask;
  PathSearch search(g);
  AttackResult result;
  while (auto competitor = find_competitor(search, work, q, opts.strict_unique)) {
    EdgeId pick = kNoEdge;
    for (EdgeId e : off_target_edges(g, *competitor, on_target)) {
      if (pick == kNoEdge || g.edge(e).cost < g.edge(pick).cost ||
          (g.edge(e).cost == g.edge(pick).cost && e < pick)) {
        pick = e;
      }
    }
    if (pick == kNoEdge) {
      throw InfeasibleError("competing path uses only target-path edges",
                            competitor->nodes);
    }
    work.insert(pick);
    result.cut_edges.push_back(pick);
    result.total_cost += g.edge(pick).cost;
    ++result.constraints_generated;
    if (opts.budget && result.total_cost > *opts.budget + 1e-9) {
      throw InfeasibleError("baseline exceeded budget", competitor->nodes);
    }
  }
  std::sort(result.cut_edges.begin(), result.cut_edges.end());
  result.valid = true;
  result.subproblem_nodes = g.node_count();
  result.subproblem_edges = g.edge_count();
  result.wall_time_ms = elapsed_ms(start);
  return result;
}

}  // namespace pathcut
