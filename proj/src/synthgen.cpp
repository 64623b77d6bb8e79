#include "pathcut/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pathcut/errors.hpp"
#include "pathcut/paths.hpp"

namespace pathcut {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

WeightedGraph lattice(int rows, int cols) {
  std::vector<Edge> edges;
  edges.reserve(2 * size_t(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      NodeId v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1});
      if (r + 1 < rows) edges.push_back({v, v + cols});
    }
  }
  return WeightedGraph::FromEdges(rows * cols, std::move(edges));
}

WeightedGraph erdos_renyi(int n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) edges.push_back({u, v});
    }
  }
  return WeightedGraph::FromEdges(n, std::move(edges));
}

WeightedGraph barabasi_albert(int n, int m, Rng& rng) {
  std::vector<Edge> edges;
  // Each endpoint appears once per incident edge: sampling from it is
  // degree-proportional.
  std::vector<NodeId> endpoints;
  for (NodeId v = 1; v <= m; ++v) {
    edges.push_back({0, v});
    endpoints.push_back(0);
    endpoints.push_back(v);
  }
  std::vector<NodeId> targets;
  for (NodeId v = m + 1; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      NodeId t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
        targets.push_back(t);
      }
    }
    for (NodeId t : targets) {
      edges.push_back({t, v});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return WeightedGraph::FromEdges(n, std::move(edges));
}

WeightedGraph watts_strogatz(int n, int k, double rewire, Rng& rng) {
  const int half = k / 2;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> present;
  std::vector<int> degree(n, 0);
  for (int j = 1; j <= half; ++j) {
    for (NodeId u = 0; u < n; ++u) {
      NodeId v = (u + j) % n;
      edges.push_back({u, v});
      present.insert(key(u, v));
      ++degree[u];
      ++degree[v];
    }
  }
  // Rewire in ring-distance order, as in the classic construction.
  for (auto& e : edges) {
    if (rng.uniform() >= rewire) continue;
    NodeId u = e.u;
    if (degree[u] >= n - 1) continue;
    NodeId w;
    do {
      w = static_cast<NodeId>(rng.below(n));
    } while (w == u || present.count(key(u, w)));
    present.erase(key(e.u, e.v));
    --degree[e.v];
    e.v = w;
    ++degree[w];
    present.insert(key(u, w));
  }
  return WeightedGraph::FromEdges(n, std::move(edges));
}

}  // namespace

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return (next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b) {
  return splitmix(splitmix(splitmix(base) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

std::string to_string(Family f) {
  switch (f) {
    case Family::kLattice: return "lattice";
    case Family::kEr: return "er";
    case Family::kBa: return "ba";
    case Family::kWs: return "ws";
  }
  return "unknown";
}

Family parse_family(const std::string& s) {
  if (s == "lattice") return Family::kLattice;
  if (s == "er") return Family::kEr;
  if (s == "ba") return Family::kBa;
  if (s == "ws") return Family::kWs;
  throw ConfigError("unknown graph family '" + s + "'");
}

bool GeneratorParams::within_benchmark_ranges() const {
  switch (family) {
    case Family::kLattice: return true;
    case Family::kEr: return p >= 0.01 && p <= 0.017;
    case Family::kBa: return m >= 5 && m <= 9;
    case Family::kWs: return k >= 11 && k <= 15 && rewire == 0.02;
  }
  return false;
}

GeneratorParams sample_benchmark_params(Family family, int n,
                                        std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x7061726d));
  GeneratorParams params;
  params.family = family;
  params.n = n;
  params.seed = seed;
  params.p = 0.01 + 0.007 * rng.uniform();
  params.m = 5 + static_cast<int>(rng.below(5));
  params.k = 11 + static_cast<int>(rng.below(5));
  params.rewire = 0.02;
  if (family == Family::kLattice) {
    int side = std::max(2, static_cast<int>(std::floor(std::sqrt(n))));
    params.rows = side;
    params.cols = side;
  }
  return params;
}

WeightedGraph generate(const GeneratorParams& params) {
  Rng rng(params.seed);
  switch (params.family) {
    case Family::kLattice:
      if (params.rows < 1 || params.cols < 1) {
        throw ValidationError("lattice needs rows, cols >= 1");
      }
      return lattice(params.rows, params.cols);
    case Family::kEr:
      if (params.n < 1 || params.p < 0 || params.p > 1) {
        throw ValidationError("ER needs n >= 1 and p in [0, 1]");
      }
      return erdos_renyi(params.n, params.p, rng);
    case Family::kBa:
      if (params.m < 1 || params.m >= params.n) {
        throw ValidationError("BA needs 1 <= m < n");
      }
      return barabasi_albert(params.n, params.m, rng);
    case Family::kWs:
      if (params.k < 2 || params.k >= params.n || params.rewire < 0 ||
          params.rewire > 1) {
        throw ValidationError("WS needs 2 <= k < n and rewire in [0, 1]");
      }
      return watts_strogatz(params.n, params.k, params.rewire, rng);
  }
  throw ValidationError("unknown family");
}

PathQuery sample_instance(const WeightedGraph& g, int k_star,
                          std::uint64_t seed) {
  if (k_star < 1) throw ValidationError("k_star must be >= 1");

  std::vector<int> component(g.node_count(), -1);
  std::vector<NodeId> best;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (component[s] >= 0) continue;
    std::vector<NodeId> members{s};
    component[s] = s;
    for (size_t i = 0; i < members.size(); ++i) {
      for (const Incidence& inc : g.neighbors(members[i])) {
        if (component[inc.neighbor] < 0) {
          component[inc.neighbor] = s;
          members.push_back(inc.neighbor);
        }
      }
    }
    if (members.size() > best.size()) best = std::move(members);
  }
  if (best.size() < 2) {
    throw SamplingError("largest component has fewer than two nodes");
  }
  std::sort(best.begin(), best.end());

  Rng rng(seed);
  const EdgeMask none;
  for (int attempt = 0; attempt < 100; ++attempt) {
    size_t i = rng.below(best.size());
    size_t j = rng.below(best.size() - 1);
    if (j >= i) ++j;
    const NodeId s = best[i];
    const NodeId t = best[j];
    std::vector<Path> paths = k_shortest_paths(g, none, s, t, k_star);
    if (static_cast<int>(paths.size()) < k_star) continue;
    PathQuery q;
    q.source = s;
    q.target = t;
    q.target_path = std::move(paths.back());
    return q;
  }
  throw SamplingError("no source/target pair with " + std::to_string(k_star) +
                      " simple paths after 100 tries");
}

}  // namespace pathcut
