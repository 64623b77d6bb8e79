#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathcut/graph.hpp"

namespace pathcut {

// Row-major node x feature matrix with named columns.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  std::vector<std::string> column_names;
  // family -> [begin, end) column range
  std::map<std::string, std::pair<int, int>> family_spans;

  FeatureMatrix() = default;
  FeatureMatrix(int r, int c) : rows(r), cols(c), values(size_t(r) * c, 0.0) {}

  double& at(int r, int c) { return values[size_t(r) * cols + c]; }
  double at(int r, int c) const { return values[size_t(r) * cols + c]; }
  std::vector<double> column(int c) const;

  // Horizontal concatenation; spans of `other` are shifted.
  void append(const FeatureMatrix& other);
};

enum class FeatureFamily { kStructural, kFlow, kPpr };

std::string to_string(FeatureFamily f);
FeatureFamily parse_feature_family(const std::string& s);
// Comma-separated list, e.g. "structural,flow,ppr" (or "all").
std::vector<FeatureFamily> parse_feature_families(const std::string& s);

inline constexpr int kStructuralColumns = 9;
inline constexpr int kPprPadWidth = 64;

struct FeatureOptions {
  // Katz attenuation; defaults to 0.9 / lambda_max. Values at or above
  // 1 / lambda_max are reduced to the default with a warning.
  std::optional<double> katz_alpha;
  double pagerank_damping = 0.85;
  double ppr_restart = 0.15;
  int ppr_pad = kPprPadWidth;
  bool normalize = true;
};

// degree, clustering, katz, pagerank, eigenvector, constraint,
// avg_neighbor_clustering, ego_edges, betweenness.
FeatureMatrix structural_features(const WeightedGraph& g,
                                  const FeatureOptions& opts = {});

// Exact s-t max flow with capacities = weights. Node value is half the sum of
// |flow| over incident edges; source and target get the flow value.
FeatureMatrix max_flow_feature(const WeightedGraph& g, const PathQuery& q);

// One personalized PageRank column per p* edge (restart mass split between
// its endpoints), zero-padded to `pad` columns.
FeatureMatrix ppr_along_target(const WeightedGraph& g, const PathQuery& q,
                               double restart = 0.15,
                               int pad = kPprPadWidth);

// Concatenates the requested families in structural, flow, ppr order and,
// when opts.normalize, z-scores every column.
FeatureMatrix assemble_features(const WeightedGraph& g, const PathQuery& q,
                                const std::vector<FeatureFamily>& families,
                                const FeatureOptions& opts = {});

// Per-column (x - mean) / sd with population sd; constant columns become 0.
void zscore_columns(FeatureMatrix& m);

void write_feature_csv(const FeatureMatrix& m, std::ostream& out);

// Building blocks, exposed for reuse and testing.

struct MaxFlowResult {
  double value = 0.0;
  // Net flow along each edge in its stored u -> v direction.
  std::vector<double> edge_flow;
};
MaxFlowResult max_flow(const WeightedGraph& g, NodeId source, NodeId sink);

// Power iteration of x = restart * e + (1 - restart) * W^T x over the
// unweighted random walk W; dangling mass returns to `personalization`.
// Iterates until the L1 change drops below `tolerance`.
std::vector<double> personalized_pagerank(
    const WeightedGraph& g, const std::vector<double>& personalization,
    double restart, double tolerance = 1e-12, int max_iterations = 100000);

// Uniform teleport, damping = 1 - restart.
std::vector<double> pagerank(const WeightedGraph& g, double damping = 0.85,
                             double tolerance = 1e-12);

// Largest adjacency eigenvalue (unweighted).
double spectral_radius(const WeightedGraph& g);

std::vector<double> katz_centrality(const WeightedGraph& g, double alpha);
std::vector<double> eigenvector_centrality(const WeightedGraph& g);
std::vector<double> clustering_coefficients(const WeightedGraph& g);
std::vector<int> triangle_counts(const WeightedGraph& g);
std::vector<double> burt_constraint(const WeightedGraph& g);
// Raw pair counts over weighted shortest paths, endpoints excluded.
std::vector<double> betweenness(const WeightedGraph& g);

}  // namespace pathcut
