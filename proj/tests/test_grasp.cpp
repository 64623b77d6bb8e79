#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "pathcut/errors.hpp"
#include "pathcut/grasp.hpp"
#include "pathcut/synthgen.hpp"

using namespace pathcut;

namespace {

struct Case {
  WeightedGraph g;
  PathQuery q;
};

Case synthetic(Family f, int n, int k_star, std::uint64_t seed) {
  GeneratorParams p = sample_benchmark_params(f, n, seed);
  if (f == Family::kLattice) {
    p.rows = p.cols = static_cast<int>(std::sqrt(n));
  }
  WeightedGraph g = generate(p);
  PathQuery q = sample_instance(g, k_star, seed + 1);
  return {std::move(g), std::move(q)};
}

bool target_wins(const WeightedGraph& g, const std::vector<EdgeId>& cut,
                 const PathQuery& q) {
  EdgeMask m;
  m.insert_all(cut);
  auto p = shortest_path(g, m, q);
  return p && p->nodes == q.target_path.nodes;
}

}  // namespace

TEST_CASE("select_nodes keeps the top tail plus the target path") {
  NodeScore s(100);
  std::iota(s.begin(), s.end(), 0.0);
  PathQuery q{10, 12, {{10, 11, 12}, 2.0}};
  auto keep = select_nodes(s, 95, q);
  CHECK(keep == std::vector<NodeId>{10, 11, 12, 95, 96, 97, 98, 99});
  CHECK(select_nodes(s, 0, q).size() == 100);
  CHECK(select_nodes(s, 100, q) == std::vector<NodeId>{10, 11, 12, 99});
  CHECK(select_nodes(NodeScore(50, 0.3), 95, q).size() == 50);
}

TEST_CASE("threshold schedule") {
  GraspConfig cfg;
  CHECK(cfg.thresholds() ==
        std::vector<double>{95, 85, 75, 65, 55, 45, 35, 25, 15, 5, 0});
  cfg.start_percentile = 50;
  cfg.decrement = 25;
  CHECK(cfg.thresholds() == std::vector<double>{50, 25, 0});
  cfg.decrement = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.decrement = 60;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.decrement = 10;
  cfg.start_percentile = 120;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("already shortest target needs no cut") {
  WeightedGraph g = oracle::random_graph(30, 60, 3, 4);
  auto p = shortest_path(g, EdgeMask(), 0, 29);
  PathQuery q{0, 29, *p};
  GraspResult r = grasp_attack(g, q, {});
  CHECK(r.attack.valid);
  CHECK(r.attack.cut_edges.empty());
  CHECK(r.trace.iterations.size() == 1);
}

TEST_CASE("constant scorer reproduces pathattack exactly") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Family f = static_cast<Family>(seed % 4);
    Case c = synthetic(f, 196, 20, 40 + seed);
    GraspConfig cfg;
    cfg.scorer = Scorer::kConstant;
    cfg.seed = seed;
    GraspResult gr = grasp_attack(c.g, c.q, cfg);
    AttackOptions opts;
    opts.seed = seed;
    AttackResult pr = pathattack(c.g, EdgeMask(), c.q, opts);
    CHECK(gr.attack.cut_edges == pr.cut_edges);
    CHECK(gr.attack.total_cost == pr.total_cost);
    CHECK(gr.attack.pathattack_calls == 1);
    CHECK(gr.attack.subproblem_edges == c.g.edge_count());
  }
}

TEST_CASE("grasp cost stays within the band of the brute-force optimum") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 30 && seed < 300; ++seed) {
    WeightedGraph g = oracle::random_graph(9 + seed % 2, 14, 600 + seed, 3);
    auto paths = k_shortest_paths(g, EdgeMask(), 0, g.node_count() - 1, 5);
    if (paths.size() < 2) continue;
    PathQuery q{0, g.node_count() - 1, paths.back()};
    const double opt = oracle::brute_force_path_cut(g, q.target_path.nodes, false);
    GraspConfig cfg;
    cfg.decrement = 30;
    GraspResult r = grasp_attack(g, q, cfg);
    CHECK(r.attack.valid);
    CHECK(target_wins(g, r.attack.cut_edges, q));
    const int constraints = std::max(1, r.attack.constraints_generated);
    CHECK(r.attack.total_cost <= (1 + std::log(constraints)) * opt + 1e-9);
    ++checked;
  }
  CHECK(checked == 30);
}

TEST_CASE("iterations grow the subgraph, accumulate cuts, and terminate") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Family f = static_cast<Family>(seed % 4);
    Case c = synthetic(f, 400, 60, 90 + seed);
    GraspConfig cfg;
    cfg.start_percentile = 99;
    cfg.decrement = 7;
    GraspResult r = grasp_attack(c.g, c.q, cfg);
    CHECK(r.attack.valid);
    CHECK(target_wins(c.g, r.attack.cut_edges, c.q));
    const auto& its = r.trace.iterations;
    REQUIRE(!its.empty());
    CHECK(its.size() <= cfg.thresholds().size());
    CHECK(r.attack.pathattack_calls == static_cast<int>(its.size()));
    for (size_t i = 1; i < its.size(); ++i) {
      CHECK(its[i].threshold < its[i - 1].threshold);
      CHECK(its[i].subgraph_nodes >= its[i - 1].subgraph_nodes);
      const auto& prev = its[i - 1].cumulative_deleted;
      const auto& cur = its[i].cumulative_deleted;
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      CHECK_FALSE(its[i - 1].valid);
    }
    CHECK(its.back().valid);
    CHECK(its.back().cumulative_deleted == r.attack.cut_edges);
    CHECK(r.final_threshold == its.back().threshold);
  }
}

TEST_CASE("grasp respects the strict tie-break option") {
  Case c = synthetic(Family::kLattice, 225, 30, 5);
  GraspConfig cfg;
  cfg.strict = true;
  GraspResult r = grasp_attack(c.g, c.q, cfg);
  EdgeMask m;
  m.insert_all(r.attack.cut_edges);
  CHECK(is_target_shortest(c.g, m, c.q, true));
}

TEST_CASE("gat scorer needs weights and reports feature time") {
  Case c = synthetic(Family::kEr, 150, 10, 7);
  GraspConfig cfg;
  cfg.scorer = Scorer::kGat;
  CHECK_THROWS_AS(grasp_attack(c.g, c.q, cfg), ConfigError);
  ModelWeights w = make_random_weights(74, 7);
  GraspResult r = grasp_attack(c.g, c.q, cfg, &w);
  CHECK(r.attack.valid);
  CHECK(r.feature_time_ms > 0);
  CHECK(r.scoring_time_ms >= r.feature_time_ms);
  CHECK(r.attack.wall_time_ms >= r.scoring_time_ms);
}

TEST_CASE("an impossible budget surfaces as infeasible") {
  Case c = synthetic(Family::kBa, 200, 40, 11);
  AttackResult full = pathattack(c.g, EdgeMask(), c.q);
  REQUIRE(full.total_cost > 0);
  GraspConfig cfg;
  cfg.budget = 0.5;
  CHECK_THROWS_AS(grasp_attack(c.g, c.q, cfg), InfeasibleError);
}

TEST_CASE("score vectors must cover every node") {
  Case c = synthetic(Family::kWs, 100, 5, 13);
  CHECK_THROWS_AS(grasp_attack_with_scores(c.g, c.q, {}, NodeScore(3, 1.0)),
                  ValidationError);
}

TEST_CASE("trace is one json object per iteration") {
  Case c = synthetic(Family::kEr, 300, 50, 17);
  GraspConfig cfg;
  cfg.start_percentile = 99;
  cfg.decrement = 3;
  GraspResult r = grasp_attack(c.g, c.q, cfg);
  std::ostringstream out;
  write_grasp_trace(r.trace, out);
  std::istringstream in(out.str());
  size_t lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["iteration"] == lines);
    CHECK(j.contains("threshold"));
    CHECK(j.contains("cumulative_deleted"));
  }
  CHECK(lines == r.trace.iterations.size());
}
