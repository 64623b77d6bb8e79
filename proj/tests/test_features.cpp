#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pathcut/errors.hpp"
#include "pathcut/features.hpp"
#include "pathcut/paths.hpp"
#include "pathcut/synthgen.hpp"

using namespace pathcut;

namespace {

PathQuery query_for(const WeightedGraph& g, NodeId s, NodeId t) {
  auto p = shortest_path(g, EdgeMask(), s, t);
  REQUIRE(p);
  return {s, t, *p};
}

WeightedGraph permuted(const WeightedGraph& g, const std::vector<NodeId>& perm) {
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    edges.push_back({perm[e.u], perm[e.v], e.weight, e.cost});
  }
  return WeightedGraph::FromEdges(g.node_count(), edges);
}

}  // namespace

TEST_CASE("triangle structural values") {
  WeightedGraph g = WeightedGraph::FromEdges(3, {{0, 1}, {1, 2}, {0, 2}});
  FeatureOptions opts;
  FeatureMatrix m = structural_features(g, opts);
  REQUIRE(m.cols == kStructuralColumns);
  for (int v = 0; v < 3; ++v) {
    CHECK(m.at(v, 0) == 2);
    CHECK(m.at(v, 1) == doctest::Approx(1.0));
    CHECK(m.at(v, 3) == doctest::Approx(1.0 / 3));
    CHECK(m.at(v, 4) == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(m.at(v, 7) == 3);
    CHECK(m.at(v, 8) == 0);
  }
  CHECK(triangle_counts(g) == std::vector<int>{1, 1, 1});
  CHECK(spectral_radius(g) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("star centre carries all betweenness") {
  WeightedGraph g = WeightedGraph::FromEdges(4, {{0, 1}, {0, 2}, {0, 3}});
  auto b = betweenness(g);
  CHECK(b[0] == doctest::Approx(3.0));
  CHECK(b[1] == 0.0);
  CHECK(clustering_coefficients(g)[0] == 0.0);
  // Burt constraint of a leaf with one contact is 1.
  CHECK(burt_constraint(g)[1] == doctest::Approx(1.0));
  CHECK(burt_constraint(g)[0] == doctest::Approx(1.0 / 3));
}

TEST_CASE("betweenness splits over tied shortest paths") {
  WeightedGraph sq =
      WeightedGraph::FromEdges(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  auto b = betweenness(sq);
  for (double x : b) CHECK(x == doctest::Approx(0.5));
}

TEST_CASE("pagerank matches a dense power iteration") {
  GeneratorParams p;
  p.family = Family::kBa;
  p.n = 30;
  p.m = 3;
  p.seed = 4;
  WeightedGraph g = generate(p);
  auto pr = pagerank(g, 0.85);
  Eigen::VectorXd want = oracle::pagerank_dense(g, 0.85);
  double l1 = 0;
  for (int v = 0; v < g.node_count(); ++v) l1 += std::fabs(pr[v] - want(v));
  CHECK(l1 < 1e-8);
  CHECK(std::accumulate(pr.begin(), pr.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("max flow on textbook graphs") {
  WeightedGraph path = WeightedGraph::FromEdges(
      3, {{0, 1, 3.0, 1.0}, {1, 2, 2.0, 1.0}});
  CHECK(max_flow(path, 0, 2).value == doctest::Approx(2.0));
  WeightedGraph diamond = WeightedGraph::FromEdges(
      4, {{0, 1, 3.0, 1.0}, {0, 2, 2.0, 1.0}, {1, 3, 2.0, 1.0},
          {2, 3, 3.0, 1.0}, {1, 2, 1.0, 1.0}});
  MaxFlowResult r = max_flow(diamond, 0, 3);
  CHECK(r.value == doctest::Approx(5.0));
  // Conservation at inner nodes.
  for (NodeId v : {1, 2}) {
    double net = 0;
    for (EdgeId e = 0; e < diamond.edge_count(); ++e) {
      const Edge& ed = diamond.edge(e);
      if (ed.u == v) net -= r.edge_flow[e];
      if (ed.v == v) net += r.edge_flow[e];
    }
    CHECK(net == doctest::Approx(0.0).epsilon(1e-12));
  }
  WeightedGraph split = WeightedGraph::FromEdges(4, {{0, 1}, {2, 3}});
  CHECK(max_flow(split, 0, 3).value == 0.0);
}

TEST_CASE("max flow equals brute-force min cut on small graphs") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + rng() % 10;
    WeightedGraph g = oracle::random_graph(n, std::min(18, n + 6),
                                           500 + trial, 7);
    const NodeId s = 0, t = n - 1;
    CHECK(max_flow(g, s, t).value ==
          doctest::Approx(oracle::brute_min_cut(g, s, t)));
  }
}

TEST_CASE("max flow feature marks terminals with the flow value") {
  WeightedGraph g = oracle::random_graph(20, 50, 12, 4);
  PathQuery q = query_for(g, 0, 19);
  FeatureMatrix m = max_flow_feature(g, q);
  const double value = max_flow(g, 0, 19).value;
  CHECK(m.cols == 1);
  CHECK(m.at(0, 0) == doctest::Approx(value));
  CHECK(m.at(19, 0) == doctest::Approx(value));
  for (int v = 0; v < 20; ++v) CHECK(m.at(v, 0) >= 0);
}

TEST_CASE("personalized pagerank on a single node") {
  WeightedGraph g = WeightedGraph::FromEdges(1, {});
  auto x = personalized_pagerank(g, {1.0}, 0.15);
  CHECK(x[0] == doctest::Approx(1.0));
}

TEST_CASE("ppr vectors sum to one and match a dense linear solve") {
  GeneratorParams p;
  p.family = Family::kWs;
  p.n = 25;
  p.k = 4;
  p.rewire = 0.2;
  p.seed = 6;
  WeightedGraph g = generate(p);
  PathQuery q = query_for(g, 0, 12);
  FeatureMatrix m = ppr_along_target(g, q);
  REQUIRE(m.cols == kPprPadWidth);
  const int used = q.target_path.edge_count();
  for (int j = 0; j < m.cols; ++j) {
    double sum = 0;
    for (int v = 0; v < g.node_count(); ++v) sum += m.at(v, j);
    if (j < used) {
      CHECK(std::fabs(sum - 1.0) <= 1e-8);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(g.node_count());
      e(q.target_path.nodes[j]) = 0.5;
      e(q.target_path.nodes[j + 1]) = 0.5;
      Eigen::VectorXd want = oracle::ppr_linear_solve(g, e, 0.15);
      for (int v = 0; v < g.node_count(); ++v) {
        CHECK(std::fabs(m.at(v, j) - want(v)) <= 1e-7);
      }
    } else {
      CHECK(sum == 0.0);
    }
  }
}

TEST_CASE("ppr with dangling nodes still sums to one") {
  WeightedGraph g = WeightedGraph::FromEdges(5, {{0, 1}, {1, 2}});
  std::vector<double> e{0.5, 0.5, 0, 0, 0};
  auto x = personalized_pagerank(g, e, 0.15);
  CHECK(std::accumulate(x.begin(), x.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-10));
  Eigen::VectorXd pe = Eigen::Map<Eigen::VectorXd>(e.data(), 5);
  Eigen::VectorXd want = oracle::ppr_linear_solve(g, pe, 0.15);
  for (int v = 0; v < 5; ++v) CHECK(x[v] == doctest::Approx(want(v)));
}

TEST_CASE("target paths longer than the pad width are rejected") {
  std::vector<Edge> edges;
  for (int i = 0; i < 70; ++i) edges.push_back({i, i + 1});
  WeightedGraph g = WeightedGraph::FromEdges(71, edges);
  PathQuery q = query_for(g, 0, 70);
  CHECK_THROWS_AS(ppr_along_target(g, q), ConfigError);
}

TEST_CASE("column counts per family selection") {
  WeightedGraph g = oracle::random_graph(30, 70, 2, 3);
  PathQuery q = query_for(g, 1, 25);
  CHECK(assemble_features(g, q, {FeatureFamily::kStructural}).cols == 9);
  CHECK(assemble_features(g, q, {FeatureFamily::kPpr}).cols == 64);
  FeatureMatrix all = assemble_features(g, q, parse_feature_families("all"));
  CHECK(all.cols == 74);
  CHECK(all.column_names.size() == 74);
  CHECK(all.family_spans.at("structural") == std::pair{0, 9});
  CHECK(all.family_spans.at("flow") == std::pair{9, 10});
  CHECK(all.family_spans.at("ppr") == std::pair{10, 74});
  CHECK_THROWS_AS(parse_feature_families("structural,bogus"), ConfigError);
}

TEST_CASE("z-scored columns have zero mean and unit or zero variance") {
  WeightedGraph g = oracle::random_graph(40, 100, 21, 5);
  PathQuery q = query_for(g, 3, 30);
  FeatureMatrix m = assemble_features(g, q, parse_feature_families("all"));
  for (int c = 0; c < m.cols; ++c) {
    auto col = m.column(c);
    double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
    double var = 0;
    for (double x : col) var += (x - mean) * (x - mean);
    var /= col.size();
    CHECK(std::fabs(mean) < 1e-9);
    CHECK((std::fabs(var - 1.0) < 1e-9 || var == 0.0));
  }
  FeatureMatrix constant(4, 1);
  for (int r = 0; r < 4; ++r) constant.at(r, 0) = 7.0;
  zscore_columns(constant);
  for (int r = 0; r < 4; ++r) CHECK(constant.at(r, 0) == 0.0);
}

TEST_CASE("relabelling nodes permutes structural and ppr rows") {
  WeightedGraph g = oracle::random_graph(30, 75, 33, 1);
  std::vector<NodeId> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  WeightedGraph h = permuted(g, perm);
  PathQuery q = query_for(g, 2, 27);
  PathQuery hq{perm[2], perm[27], {}};
  for (NodeId v : q.target_path.nodes) hq.target_path.nodes.push_back(perm[v]);
  hq.target_path.length = q.target_path.length;
  std::vector<FeatureFamily> fams{FeatureFamily::kStructural,
                                  FeatureFamily::kPpr};
  FeatureMatrix a = assemble_features(g, q, fams);
  FeatureMatrix b = assemble_features(h, hq, fams);
  for (int v = 0; v < 30; ++v) {
    for (int c = 0; c < a.cols; ++c) {
      CHECK(a.at(v, c) == doctest::Approx(b.at(perm[v], c)).epsilon(1e-6));
    }
  }
}

TEST_CASE("features are finite on every generator family") {
  for (Family f : {Family::kLattice, Family::kEr, Family::kBa, Family::kWs}) {
    GeneratorParams p = sample_benchmark_params(f, 200, 3);
    if (f == Family::kLattice) p.rows = p.cols = 14;
    WeightedGraph g = generate(p);
    PathQuery q = sample_instance(g, 5, 9);
    FeatureMatrix m = assemble_features(g, q, parse_feature_families("all"));
    CHECK(m.rows == g.node_count());
    for (double x : m.values) CHECK(std::isfinite(x));
  }
}

TEST_CASE("katz alpha above the convergence bound falls back") {
  WeightedGraph g = oracle::random_graph(20, 40, 4);
  FeatureOptions bad;
  bad.katz_alpha = 5.0;
  FeatureMatrix a = structural_features(g, bad);
  FeatureMatrix b = structural_features(g);
  for (int v = 0; v < 20; ++v) CHECK(a.at(v, 2) == doctest::Approx(b.at(v, 2)));
}

TEST_CASE("feature CSV header lists node then column names") {
  WeightedGraph g = WeightedGraph::FromEdges(3, {{0, 1}, {1, 2}});
  FeatureMatrix m = structural_features(g);
  std::ostringstream out;
  write_feature_csv(m, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.find("degree") != std::string::npos);
  CHECK(header.find("betweenness") != std::string::npos);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 3);
}
