#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pathcut/attack.hpp"
#include "pathcut/errors.hpp"
#include "pathcut/set_cover.hpp"
#include "pathcut/simplex.hpp"
#include "pathcut/synthgen.hpp"

using namespace pathcut;

namespace {

struct RandomCover {
  std::vector<double> costs;
  std::vector<std::vector<int>> rows;
};

RandomCover random_cover(std::mt19937_64& rng, int vars, int rows) {
  RandomCover rc;
  for (int v = 0; v < vars; ++v) rc.costs.push_back(1 + rng() % 9);
  for (int r = 0; r < rows; ++r) {
    std::vector<int> row;
    const int len = 1 + rng() % 4;
    for (int i = 0; i < len; ++i) row.push_back(rng() % vars);
    rc.rows.push_back(row);
  }
  return rc;
}

ConstraintSystem as_system(const RandomCover& rc) {
  ConstraintSystem cs(rc.costs);
  for (const auto& r : rc.rows) cs.add_constraint({r.begin(), r.end()});
  return cs;
}

double harmonic_band(int constraints) {
  return 1.0 + std::log(std::max(1, constraints));
}

// Small instance with p* drawn among the first few paths.
std::optional<PathQuery> small_query(const WeightedGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NodeId s = 0, t = g.node_count() - 1;
  auto paths = k_shortest_paths(g, EdgeMask(), s, t, 6);
  if (paths.size() < 2) return std::nullopt;
  return PathQuery{s, t, paths[1 + rng() % (paths.size() - 1)]};
}

}  // namespace

TEST_CASE("simplex solves a small packing LP") {
  // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3.
  DenseMatrix a(3, 2);
  a.at(0, 0) = 1; a.at(0, 1) = 1;
  a.at(1, 0) = 1; a.at(1, 1) = 3;
  a.at(2, 0) = 1;
  LpSolution s = maximize_packing(a, {4, 6, 3}, {3, 2});
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(11.0));
  CHECK(s.primal[0] == doctest::Approx(3.0));
  CHECK(s.primal[1] == doctest::Approx(1.0));
  // Strong duality.
  double dual_obj = 4 * s.dual[0] + 6 * s.dual[1] + 3 * s.dual[2];
  CHECK(dual_obj == doctest::Approx(11.0));
}

TEST_CASE("greedy cover picks the best ratio first") {
  ConstraintSystem cs(std::vector<double>{1, 1, 3});
  cs.add_constraint({0, 2});
  cs.add_constraint({1, 2});
  auto cover = greedy_set_cover(cs);
  CHECK(cover == std::vector<EdgeId>{0, 1});
  CHECK(cs.covers(cover));
  CHECK(cs.total_cost(cover) == 2.0);
}

TEST_CASE("empty and protected constraints are rejected") {
  ConstraintSystem cs(std::vector<double>{1, 1, 1}, std::vector<EdgeId>{2});
  CHECK(cs.variable_count() == 2);
  CHECK_THROWS_AS(cs.add_constraint({}), InfeasibleError);
  CHECK_THROWS_AS(cs.add_constraint({2}), ValidationError);
  CHECK_THROWS_AS(cs.add_constraint({7}), ValidationError);
  cs.add_constraint({1, 0, 1});
  CHECK(cs.constraints()[0] == std::vector<EdgeId>{0, 1});
  CHECK(cs.matrix_rows() == 2 * 2 + 1);
  CHECK(cs.matrix_cols() == 2);
  cs.set_budget(4.0);
  CHECK(cs.matrix_rows() == 2 * 2 + 2);
}

TEST_CASE("greedy cover stays within the harmonic band of the optimum") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    RandomCover rc = random_cover(rng, 6 + rng() % 10, 3 + rng() % 12);
    ConstraintSystem cs = as_system(rc);
    auto cover = greedy_set_cover(cs);
    CHECK(cs.covers(cover));
    const double opt = oracle::brute_set_cover(rc.costs, rc.rows);
    CHECK(cs.total_cost(cover) <=
          harmonic_band(cs.constraint_count()) * opt + 1e-9);
  }
}

TEST_CASE("lp relaxation of a single constraint takes its cheapest edge") {
  ConstraintSystem cs(std::vector<double>{4, 2, 3});
  cs.add_constraint({0, 1, 2});
  LpRelaxation lp = solve_cover_lp(cs);
  CHECK(lp.objective == doctest::Approx(2.0));
  CHECK(lp.values[1] == doctest::Approx(1.0));
  CoverSolution sol = lp_cover_round(cs, 3);
  CHECK(sol.edges == std::vector<EdgeId>{1});
  CHECK(sol.cost == 2.0);
}

TEST_CASE("lp relaxation lower-bounds every integral cover") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    RandomCover rc = random_cover(rng, 5 + rng() % 12, 2 + rng() % 15);
    ConstraintSystem cs = as_system(rc);
    LpRelaxation lp = solve_cover_lp(cs);
    const double opt = oracle::brute_set_cover(rc.costs, rc.rows);
    CHECK(lp.objective <= opt + 1e-7);
    CHECK(lp.objective <= cs.total_cost(greedy_set_cover(cs)) + 1e-7);
    for (const auto& row : cs.constraints()) {
      double sum = 0;
      for (EdgeId e : row) sum += lp.values[e];
      CHECK(sum >= 1.0 - 1e-7);
    }
    for (double x : lp.values) {
      CHECK(x >= -1e-9);
      CHECK(x <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("rounded lp covers are feasible and within the band over many seeds") {
  std::mt19937_64 rng(303);
  RandomCover rc = random_cover(rng, 14, 10);
  ConstraintSystem cs = as_system(rc);
  const double opt = oracle::brute_set_cover(rc.costs, rc.rows);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CoverSolution sol = lp_cover_round(cs, seed);
    CHECK(cs.covers(sol.edges));
    CHECK(sol.cost == doctest::Approx(cs.total_cost(sol.edges)));
    CHECK(sol.cost <= harmonic_band(cs.constraint_count()) * opt + 1e-9);
    CHECK(sol.trials >= 1);
    CHECK(sol.trials <= 100);
  }
  CHECK(lp_cover_round(cs, 5).edges == lp_cover_round(cs, 5).edges);
}

TEST_CASE("prune drops redundant expensive edges first") {
  ConstraintSystem cs(std::vector<double>{5, 1, 1});
  cs.add_constraint({0, 1});
  cs.add_constraint({0, 2});
  CHECK(prune_cover(cs, {0, 1, 2}) == std::vector<EdgeId>{1, 2});
}

TEST_CASE("covering LP export lists rows, budget and bounds") {
  ConstraintSystem cs(std::vector<double>{1, 2, 3});
  cs.add_constraint({0, 1});
  cs.add_constraint({2});
  cs.set_budget(10.0);
  std::ostringstream out;
  cs.write_lp(out);
  const std::string lp = out.str();
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("x0 + x1 >= 1") != std::string::npos);
  CHECK(lp.find("budget:") != std::string::npos);
  CHECK(lp.find("0 <= x2 <= 1") != std::string::npos);
  CHECK(lp.find("End") != std::string::npos);
}

TEST_CASE("pathattack on a 4-cycle cuts the competing side") {
  WeightedGraph g =
      WeightedGraph::FromEdges(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  PathQuery q{0, 3, make_path(g, {0, 2, 3})};
  AttackResult r = pathattack(g, EdgeMask(), q);
  CHECK(r.valid);
  CHECK(r.cut_edges.size() == 1);
  CHECK(r.total_cost == 1.0);
  EdgeMask m;
  m.insert_all(r.cut_edges);
  CHECK(shortest_path(g, m, 0, 3)->nodes == q.target_path.nodes);
}

TEST_CASE("already shortest targets need no cut") {
  WeightedGraph g =
      WeightedGraph::FromEdges(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  PathQuery q{0, 3, make_path(g, {0, 1, 3})};
  AttackResult r = pathattack(g, EdgeMask(), q);
  CHECK(r.cut_edges.empty());
  CHECK(r.total_cost == 0.0);
  CHECK(r.valid);
  // The unique variant must still break the tie with 0-2-3.
  AttackOptions strict;
  strict.strict_unique = true;
  AttackResult s = pathattack(g, EdgeMask(), q, strict);
  CHECK(s.cut_edges.size() == 1);
  CHECK(is_target_shortest(g, [&] {
    EdgeMask m;
    m.insert_all(s.cut_edges);
    return m;
  }(), q, true));
}

TEST_CASE("pathattack stays within the band of the brute-force optimum") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 40 && seed < 400; ++seed) {
    WeightedGraph g = oracle::random_graph(8 + seed % 3, 13, 7000 + seed, 3);
    if (g.edge_count() > 14) continue;
    auto q = small_query(g, seed);
    if (!q) continue;
    for (bool strict : {false, true}) {
      const double opt =
          oracle::brute_force_path_cut(g, q->target_path.nodes, strict);
      for (CoverBackend cover : {CoverBackend::kGreedy, CoverBackend::kLp}) {
        AttackOptions opts;
        opts.cover = cover;
        opts.strict_unique = strict;
        opts.seed = seed;
        AttackResult r = pathattack(g, EdgeMask(), *q, opts);
        CHECK(r.valid);
        CHECK(r.total_cost >= opt - 1e-9);
        CHECK(r.total_cost <=
              harmonic_band(r.constraints_generated) * opt + 1e-9);
      }
    }
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("cuts never touch p* and satisfy every generated constraint") {
  for (Family f : {Family::kEr, Family::kBa, Family::kWs, Family::kLattice}) {
    GeneratorParams p = sample_benchmark_params(f, 150, 4);
    if (f == Family::kLattice) p.rows = p.cols = 12;
    WeightedGraph g = generate(p);
    PathQuery q = sample_instance(g, 15, 5);
    ConstraintSystem cs;
    AttackResult r = pathattack(g, EdgeMask(), q, {}, &cs);
    CHECK(r.valid);
    CHECK(cs.covers(r.cut_edges));
    CHECK(r.constraints_generated == cs.constraint_count());
    for (EdgeId e : path_edges(g, q.target_path)) {
      CHECK_FALSE(std::binary_search(r.cut_edges.begin(), r.cut_edges.end(), e));
    }
    CHECK(r.subproblem_nodes == g.node_count());
    CHECK(r.subproblem_edges == g.edge_count());
    CHECK(r.pathattack_calls == 1);
  }
}

TEST_CASE("baseline cuts the cheapest edge of each competitor") {
  WeightedGraph g = WeightedGraph::FromEdges(
      4, {{0, 1, 1.0, 5.0}, {1, 3, 1.0, 2.0}, {0, 2, 1.0, 1.0},
          {2, 3, 1.5, 1.0}});
  PathQuery q{0, 3, make_path(g, {0, 2, 3})};
  AttackResult r = baseline_greedy(g, EdgeMask(), q);
  CHECK(r.valid);
  CHECK(r.cut_edges == std::vector<EdgeId>{*g.find_edge(1, 3)});
  CHECK(r.total_cost == 2.0);
}

TEST_CASE("baseline never beats the brute-force optimum") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    WeightedGraph g = oracle::random_graph(9, 13, 9000 + seed, 3);
    auto q = small_query(g, seed);
    if (!q) continue;
    AttackResult r = baseline_greedy(g, EdgeMask(), *q);
    CHECK(r.valid);
    CHECK(r.total_cost >=
          oracle::brute_force_path_cut(g, q->target_path.nodes, false) - 1e-9);
  }
}

TEST_CASE("a budget below the optimum is infeasible") {
  WeightedGraph g = WeightedGraph::FromEdges(
      5, {{0, 1}, {1, 4}, {0, 2}, {2, 4}, {0, 3, 2.0, 1.0}, {3, 4, 2.0, 1.0}});
  PathQuery q{0, 4, make_path(g, {0, 3, 4})};
  AttackOptions opts;
  opts.budget = 1.0;
  CHECK_THROWS_AS(pathattack(g, EdgeMask(), q, opts), InfeasibleError);
  opts.cover = CoverBackend::kLp;
  CHECK_THROWS_AS(pathattack(g, EdgeMask(), q, opts), InfeasibleError);
  CHECK_THROWS_AS(baseline_greedy(g, EdgeMask(), q, opts), InfeasibleError);
  opts.budget = 2.0;
  CHECK(pathattack(g, EdgeMask(), q, opts).total_cost == 2.0);
}

TEST_CASE("a detour target forces the chord cut; masked p* is rejected") {
  WeightedGraph g = WeightedGraph::FromEdges(
      4, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}, {2, 3, 1.0, 1.0},
          {0, 3, 1.0, 1.0}});
  PathQuery q{0, 3, make_path(g, {0, 1, 2, 3})};
  AttackResult r = pathattack(g, EdgeMask(), q);
  CHECK(r.cut_edges == std::vector<EdgeId>{*g.find_edge(0, 3)});
  // A mask deleting a p* edge invalidates the query.
  EdgeMask m;
  m.insert(*g.find_edge(1, 2));
  CHECK_THROWS_AS(pathattack(g, m, q), ValidationError);
}

TEST_CASE("cover backend names round trip") {
  CHECK(parse_cover_backend("greedy") == CoverBackend::kGreedy);
  CHECK(parse_cover_backend(to_string(CoverBackend::kLp)) == CoverBackend::kLp);
  CHECK_THROWS_AS(parse_cover_backend("ilp"), ConfigError);
}
