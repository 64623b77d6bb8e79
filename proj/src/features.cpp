#include "pathcut/features.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "pathcut/errors.hpp"

namespace pathcut {
namespace {

void normalize_l2(std::vector<double>& x) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double& v : x) v /= norm;
  }
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
  return d;
}

// y = A x for the unweighted adjacency matrix.
void adjacency_multiply(const WeightedGraph& g, const std::vector<double>& x,
                        std::vector<double>& y) {
  for (NodeId v = 0; v < g.node_count(); ++v) {
    double sum = 0.0;
    for (const Incidence& inc : g.neighbors(v)) sum += x[inc.neighbor];
    y[v] = sum;
  }
}

FeatureMatrix single_family(int rows, const std::string& family,
                            const std::vector<std::string>& names) {
  FeatureMatrix m(rows, static_cast<int>(names.size()));
  m.column_names = names;
  m.family_spans[family] = {0, m.cols};
  return m;
}

// Dinic's algorithm on the undirected graph: each edge becomes a pair of
// opposite arcs that double as each other's residual.
class Dinic {
 public:
  explicit Dinic(const WeightedGraph& g)
      : g_(g), residual_(2 * size_t(g.edge_count())), level_(g.node_count()),
        next_(g.node_count()) {
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      residual_[2 * e] = g.edge(e).weight;
      residual_[2 * e + 1] = g.edge(e).weight;
    }
  }

  double run(NodeId s, NodeId t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

  // Net flow in the edge's stored u -> v direction.
  double edge_flow(EdgeId e) const {
    return g_.edge(e).weight - residual_[2 * e];
  }

 private:
  static constexpr double kEps = 1e-12;

  // Arc leaving `from` along edge e.
  size_t arc(EdgeId e, NodeId from) const {
    return 2 * size_t(e) + (g_.edge(e).u == from ? 0 : 1);
  }
  size_t reverse(size_t a) const { return a ^ 1; }

  bool bfs(NodeId s, NodeId t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<NodeId> queue;
    level_[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop();
      for (const Incidence& inc : g_.neighbors(v)) {
        if (level_[inc.neighbor] < 0 && residual_[arc(inc.edge, v)] > kEps) {
          level_[inc.neighbor] = level_[v] + 1;
          queue.push(inc.neighbor);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(NodeId v, NodeId t, double limit) {
    if (v == t) return limit;
    auto adj = g_.neighbors(v);
    for (int& i = next_[v]; i < static_cast<int>(adj.size()); ++i) {
      const Incidence& inc = adj[i];
      size_t a = arc(inc.edge, v);
      if (level_[inc.neighbor] != level_[v] + 1 || residual_[a] <= kEps) {
        continue;
      }
      double pushed = dfs(inc.neighbor, t, std::min(limit, residual_[a]));
      if (pushed > kEps) {
        residual_[a] -= pushed;
        residual_[reverse(a)] += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  const WeightedGraph& g_;
  std::vector<double> residual_;
  std::vector<int> level_;
  std::vector<int> next_;
};

}  // namespace

std::vector<double> FeatureMatrix::column(int c) const {
  std::vector<double> out(rows);
  for (int r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

void FeatureMatrix::append(const FeatureMatrix& other) {
  if (cols == 0 && rows == 0) rows = other.rows;
  if (other.rows != rows) throw ValidationError("feature row count mismatch");
  const int new_cols = cols + other.cols;
  std::vector<double> merged(size_t(rows) * new_cols);
  for (int r = 0; r < rows; ++r) {
    std::copy_n(values.begin() + size_t(r) * cols, cols,
                merged.begin() + size_t(r) * new_cols);
    std::copy_n(other.values.begin() + size_t(r) * other.cols, other.cols,
                merged.begin() + size_t(r) * new_cols + cols);
  }
  for (const auto& [family, span] : other.family_spans) {
    family_spans[family] = {span.first + cols, span.second + cols};
  }
  column_names.insert(column_names.end(), other.column_names.begin(),
                      other.column_names.end());
  values = std::move(merged);
  cols = new_cols;
}

std::string to_string(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::kStructural: return "structural";
    case FeatureFamily::kFlow: return "flow";
    case FeatureFamily::kPpr: return "ppr";
  }
  return "unknown";
}

FeatureFamily parse_feature_family(const std::string& s) {
  if (s == "structural") return FeatureFamily::kStructural;
  if (s == "flow") return FeatureFamily::kFlow;
  if (s == "ppr") return FeatureFamily::kPpr;
  throw ConfigError("unknown feature family '" + s + "'");
}

std::vector<FeatureFamily> parse_feature_families(const std::string& s) {
  if (s == "all") {
    return {FeatureFamily::kStructural, FeatureFamily::kFlow,
            FeatureFamily::kPpr};
  }
  std::vector<FeatureFamily> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(parse_feature_family(item));
  }
  if (out.empty()) throw ConfigError("empty feature family list");
  return out;
}

double spectral_radius(const WeightedGraph& g) {
  const int n = g.node_count();
  if (g.edge_count() == 0) return 0.0;
  // Power iteration on A + I: the shift keeps bipartite graphs from
  // oscillating and leaves the top eigenvector unchanged.
  std::vector<double> x(n, 1.0), y(n);
  normalize_l2(x);
  double estimate = 0.0;
  for (int it = 0; it < 100000; ++it) {
    adjacency_multiply(g, x, y);
    double rayleigh = 0.0;
    for (int v = 0; v < n; ++v) rayleigh += x[v] * y[v];
    for (int v = 0; v < n; ++v) y[v] += x[v];
    normalize_l2(y);
    double change = l1_distance(x, y);
    x.swap(y);
    const bool settled =
        std::fabs(rayleigh - estimate) < 1e-12 * std::max(1.0, rayleigh);
    estimate = rayleigh;
    if (settled || change < 1e-12) break;
  }
  return estimate;
}

std::vector<double> katz_centrality(const WeightedGraph& g, double alpha) {
  const int n = g.node_count();
  std::vector<double> x(n, 0.0), y(n);
  for (int it = 0; it < 100000; ++it) {
    adjacency_multiply(g, x, y);
    for (double& v : y) v = alpha * v + 1.0;
    double change = l1_distance(x, y);
    x.swap(y);
    if (change < 1e-11 * std::max(1, n)) break;
  }
  normalize_l2(x);
  return x;
}

std::vector<double> eigenvector_centrality(const WeightedGraph& g) {
  const int n = g.node_count();
  std::vector<double> x(n, 1.0), y(n);
  normalize_l2(x);
  for (int it = 0; it < 10000; ++it) {
    adjacency_multiply(g, x, y);
    for (int v = 0; v < n; ++v) y[v] += x[v];
    normalize_l2(y);
    double change = l1_distance(x, y);
    x.swap(y);
    if (change < 1e-11 * std::max(1, n)) break;
  }
  return x;
}

std::vector<int> triangle_counts(const WeightedGraph& g) {
  const int n = g.node_count();
  std::vector<int> out(n, 0);
  std::vector<NodeId> mark(n, kNoNode);
  for (NodeId v = 0; v < n; ++v) {
    for (const Incidence& inc : g.neighbors(v)) mark[inc.neighbor] = v;
    long long twice = 0;
    for (const Incidence& inc : g.neighbors(v)) {
      for (const Incidence& far : g.neighbors(inc.neighbor)) {
        if (mark[far.neighbor] == v) ++twice;
      }
    }
    out[v] = static_cast<int>(twice / 2);
  }
  return out;
}

std::vector<double> clustering_coefficients(const WeightedGraph& g) {
  std::vector<int> tri = triangle_counts(g);
  std::vector<double> out(g.node_count(), 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    double d = g.degree(v);
    if (d >= 2) out[v] = 2.0 * tri[v] / (d * (d - 1));
  }
  return out;
}

std::vector<double> burt_constraint(const WeightedGraph& g) {
  const int n = g.node_count();
  std::vector<double> out(n, 0.0);
  std::vector<NodeId> mark(n, kNoNode);
  for (NodeId i = 0; i < n; ++i) {
    const int di = g.degree(i);
    if (di == 0) continue;
    for (const Incidence& inc : g.neighbors(i)) mark[inc.neighbor] = i;
    const double pi = 1.0 / di;
    double total = 0.0;
    for (const Incidence& j : g.neighbors(i)) {
      double indirect = 0.0;
      for (const Incidence& q : g.neighbors(j.neighbor)) {
        if (q.neighbor != i && mark[q.neighbor] == i) {
          indirect += pi / g.degree(q.neighbor);
        }
      }
      double local = pi + indirect;
      total += local * local;
    }
    out[i] = total;
  }
  return out;
}

std::vector<double> betweenness(const WeightedGraph& g) {
  const int n = g.node_count();
  std::vector<double> score(n, 0.0);
  std::vector<double> dist(n), sigma(n), delta(n);
  std::vector<std::vector<NodeId>> preds(n);
  std::vector<char> done(n);
  std::vector<NodeId> order;
  using Entry = std::pair<double, NodeId>;

  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(done.begin(), done.end(), 0);
    for (auto& p : preds) p.clear();
    order.clear();

    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.push({0.0, s});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (done[v]) continue;
      done[v] = 1;
      order.push_back(v);
      for (const Incidence& inc : g.neighbors(v)) {
        NodeId u = inc.neighbor;
        if (done[u]) continue;
        double nd = d + g.edge(inc.edge).weight;
        if (std::isinf(dist[u]) || (nd < dist[u] && !lengths_tie(nd, dist[u]))) {
          dist[u] = nd;
          sigma[u] = sigma[v];
          preds[u].assign(1, v);
          heap.push({nd, u});
        } else if (lengths_tie(nd, dist[u])) {
          sigma[u] += sigma[v];
          preds[u].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      for (NodeId v : preds[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) score[w] += delta[w];
    }
  }
  for (double& v : score) v /= 2.0;  // each unordered pair counted twice
  return score;
}

std::vector<double> personalized_pagerank(
    const WeightedGraph& g, const std::vector<double>& personalization,
    double restart, double tolerance, int max_iterations) {
  const int n = g.node_count();
  if (static_cast<int>(personalization.size()) != n) {
    throw ValidationError("personalization length must equal node count");
  }
  double mass = std::accumulate(personalization.begin(), personalization.end(),
                                0.0);
  if (!(mass > 0)) throw ValidationError("personalization has no mass");
  std::vector<double> e(n);
  for (int v = 0; v < n; ++v) e[v] = personalization[v] / mass;

  std::vector<double> x = e, y(n);
  for (int it = 0; it < max_iterations; ++it) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (g.degree(v) == 0) dangling += x[v];
    }
    for (NodeId v = 0; v < n; ++v) {
      double inflow = 0.0;
      for (const Incidence& inc : g.neighbors(v)) {
        inflow += x[inc.neighbor] / g.degree(inc.neighbor);
      }
      y[v] = restart * e[v] + (1.0 - restart) * (inflow + dangling * e[v]);
    }
    double change = l1_distance(x, y);
    x.swap(y);
    if (change < tolerance) break;
  }
  return x;
}

std::vector<double> pagerank(const WeightedGraph& g, double damping,
                             double tolerance) {
  const int n = g.node_count();
  if (n == 0) return {};
  return personalized_pagerank(g, std::vector<double>(n, 1.0), 1.0 - damping,
                               tolerance);
}

MaxFlowResult max_flow(const WeightedGraph& g, NodeId source, NodeId sink) {
  if (!g.contains(source) || !g.contains(sink) || source == sink) {
    throw ValidationError("max flow needs distinct known source and sink");
  }
  Dinic dinic(g);
  MaxFlowResult out;
  out.value = dinic.run(source, sink);
  out.edge_flow.resize(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) out.edge_flow[e] = dinic.edge_flow(e);
  return out;
}

FeatureMatrix structural_features(const WeightedGraph& g,
                                  const FeatureOptions& opts) {
  const int n = g.node_count();
  FeatureMatrix m = single_family(
      n, "structural",
      {"degree", "clustering", "katz", "pagerank", "eigenvector", "constraint",
       "avg_neighbor_clustering", "ego_edges", "betweenness"});
  if (n == 0) return m;

  const double lambda = spectral_radius(g);
  double alpha = lambda > 0 ? 0.9 / lambda : 0.0;
  if (opts.katz_alpha) {
    if (lambda > 0 && *opts.katz_alpha * lambda >= 1.0) {
      std::cerr << "warning: Katz alpha " << *opts.katz_alpha
                << " diverges (spectral radius " << lambda
                << "); using " << alpha << "\n";
    } else {
      alpha = *opts.katz_alpha;
    }
  }

  std::vector<int> tri = triangle_counts(g);
  std::vector<double> clust = clustering_coefficients(g);
  std::vector<double> katz = katz_centrality(g, alpha);
  std::vector<double> pr = pagerank(g, opts.pagerank_damping);
  std::vector<double> eig = eigenvector_centrality(g);
  std::vector<double> burt = burt_constraint(g);
  std::vector<double> btw = betweenness(g);

  for (NodeId v = 0; v < n; ++v) {
    double neighbor_clust = 0.0;
    for (const Incidence& inc : g.neighbors(v)) {
      neighbor_clust += clust[inc.neighbor];
    }
    if (g.degree(v) > 0) neighbor_clust /= g.degree(v);
    m.at(v, 0) = g.degree(v);
    m.at(v, 1) = clust[v];
    m.at(v, 2) = katz[v];
    m.at(v, 3) = pr[v];
    m.at(v, 4) = eig[v];
    m.at(v, 5) = burt[v];
    m.at(v, 6) = neighbor_clust;
    m.at(v, 7) = g.degree(v) + tri[v];
    m.at(v, 8) = btw[v];
  }
  return m;
}

FeatureMatrix max_flow_feature(const WeightedGraph& g, const PathQuery& q) {
  FeatureMatrix m = single_family(g.node_count(), "flow", {"max_flow"});
  MaxFlowResult flow = max_flow(g, q.source, q.target);
  if (flow.value <= 0) return m;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    double f = std::fabs(flow.edge_flow[e]) / 2.0;
    m.at(g.edge(e).u, 0) += f;
    m.at(g.edge(e).v, 0) += f;
  }
  m.at(q.source, 0) = flow.value;
  m.at(q.target, 0) = flow.value;
  return m;
}

FeatureMatrix ppr_along_target(const WeightedGraph& g, const PathQuery& q,
                               double restart, int pad) {
  const int path_edges = q.target_path.edge_count();
  if (path_edges > pad) {
    throw ConfigError("target path has " + std::to_string(path_edges) +
                      " edges, exceeding the PPR pad width " +
                      std::to_string(pad));
  }
  std::vector<std::string> names;
  for (int j = 0; j < pad; ++j) names.push_back("ppr_" + std::to_string(j));
  FeatureMatrix m = single_family(g.node_count(), "ppr", names);
  const auto& nodes = q.target_path.nodes;
  std::vector<double> seed(g.node_count(), 0.0);
  for (int j = 0; j < path_edges; ++j) {
    std::fill(seed.begin(), seed.end(), 0.0);
    seed[nodes[j]] = 0.5;
    seed[nodes[j + 1]] = 0.5;
    std::vector<double> x = personalized_pagerank(g, seed, restart, 1e-12);
    for (NodeId v = 0; v < g.node_count(); ++v) m.at(v, j) = x[v];
  }
  return m;
}

void zscore_columns(FeatureMatrix& m) {
  for (int c = 0; c < m.cols; ++c) {
    double mean = 0.0;
    for (int r = 0; r < m.rows; ++r) mean += m.at(r, c);
    mean /= std::max(1, m.rows);
    double var = 0.0;
    for (int r = 0; r < m.rows; ++r) {
      double d = m.at(r, c) - mean;
      var += d * d;
    }
    var /= std::max(1, m.rows);
    double sd = std::sqrt(var);
    bool constant = !(sd > 1e-12 * std::max(1.0, std::fabs(mean)));
    for (int r = 0; r < m.rows; ++r) {
      m.at(r, c) = constant ? 0.0 : (m.at(r, c) - mean) / sd;
    }
  }
}

FeatureMatrix assemble_features(const WeightedGraph& g, const PathQuery& q,
                                const std::vector<FeatureFamily>& families,
                                const FeatureOptions& opts) {
  auto wants = [&](FeatureFamily f) {
    return std::find(families.begin(), families.end(), f) != families.end();
  };
  FeatureMatrix out;
  out.rows = g.node_count();
  if (wants(FeatureFamily::kStructural)) out.append(structural_features(g, opts));
  if (wants(FeatureFamily::kFlow)) out.append(max_flow_feature(g, q));
  if (wants(FeatureFamily::kPpr)) {
    out.append(ppr_along_target(g, q, opts.ppr_restart, opts.ppr_pad));
  }
  for (double v : out.values) {
    if (!std::isfinite(v)) throw NumericError("non-finite feature value");
  }
  if (opts.normalize) zscore_columns(out);
  return out;
}

void write_feature_csv(const FeatureMatrix& m, std::ostream& out) {
  for (int c = 0; c < m.cols; ++c) {
    out << (c ? "," : "") << m.column_names[c];
  }
  out << '\n' << std::setprecision(17);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) out << (c ? "," : "") << m.at(r, c);
    out << '\n';
  }
}

}  // namespace pathcut
