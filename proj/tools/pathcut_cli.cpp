// pathcut: command-line driver for generation, features, attacks, and
// benchmarks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathcut/attack.hpp"
#include "pathcut/bench.hpp"
#include "pathcut/errors.hpp"
#include "pathcut/features.hpp"
#include "pathcut/gat.hpp"
#include "pathcut/graph_io.hpp"
#include "pathcut/grasp.hpp"
#include "pathcut/scoring.hpp"
#include "pathcut/set_cover.hpp"
#include "pathcut/synthgen.hpp"

namespace fs = std::filesystem;
using namespace pathcut;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

fs::path in_out_dir(const Globals& g, const std::string& file) {
  fs::path p(file);
  if (p.is_absolute() || p.has_parent_path()) return p;
  return fs::path(g.out_dir) / p;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void small_graph_advisory(const WeightedGraph& g) {
  if (g.edge_count() < 1000) {
    std::cerr << "note: graph has " << g.edge_count()
              << " edges; on graphs this small plain pathattack is often "
                 "faster than grasp\n";
  }
}

// ---- gen ----

struct GenArgs {
  std::string family = "er";
  int n = 1000;
  std::optional<double> p;
  std::optional<int> m, k, rows, cols;
  int k_star = 100;
  std::string name = "instance";
};

int run_gen(const Globals& glob, const GenArgs& a) {
  GeneratorParams params =
      sample_benchmark_params(parse_family(a.family), a.n, glob.seed);
  if (a.p) params.p = *a.p;
  if (a.m) params.m = *a.m;
  if (a.k) params.k = *a.k;
  if (a.rows) params.rows = *a.rows;
  if (a.cols) params.cols = *a.cols;
  WeightedGraph g = generate(params);
  PathQuery q = sample_instance(g, a.k_star, derive_seed(glob.seed, 1));

  fs::create_directories(glob.out_dir);
  const fs::path graph_file = fs::path(glob.out_dir) / (a.name + ".tsv");
  const fs::path inst_file = fs::path(glob.out_dir) / (a.name + ".json");
  save_edge_list(g, graph_file);
  InstanceFile inst;
  inst.graph = graph_file.filename().string();
  inst.source = q.source;
  inst.target = q.target;
  inst.p_star = q.target_path.nodes;
  save_instance_file(inst, inst_file);
  std::cout << "wrote " << graph_file.string() << " (" << g.node_count()
            << " nodes, " << g.edge_count() << " edges) and "
            << inst_file.string() << " (|p*| = " << q.target_path.edge_count()
            << " edges, length " << q.target_path.length << ")\n";
  return 0;
}

// ---- features ----

struct FeatureArgs {
  std::string instance;
  std::string families = "all";
  bool raw = false;
  std::string out = "features.csv";
};

int run_features(const Globals& glob, const FeatureArgs& a) {
  LoadedInstance inst = load_instance(a.instance);
  FeatureOptions opts;
  opts.normalize = !a.raw;
  FeatureMatrix m = assemble_features(inst.graph, inst.query,
                                      parse_feature_families(a.families), opts);
  const fs::path out = in_out_dir(glob, a.out);
  ensure_parent(out);
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out.string());
  write_feature_csv(m, f);
  std::cout << "wrote " << out.string() << " (" << m.rows << " x " << m.cols
            << ")\n";
  return 0;
}

// ---- attack ----

struct AttackArgs {
  std::string instance;
  std::string method = "pathattack";
  std::string cover = "greedy";
  std::string scorer = "detour";
  std::string weights;
  double start_pct = 95.0;
  double decrement = 10.0;
  bool strict_unique = false;
  std::optional<double> budget;
  std::string out;
  std::string dump_lp;
  std::string trace;
};

int run_attack(const Globals& glob, const AttackArgs& a) {
  LoadedInstance inst = load_instance(a.instance);
  const WeightedGraph& g = inst.graph;
  const PathQuery& q = inst.query;

  AttackResult result;
  std::optional<GraspResult> grasp;
  if (a.method == "pathattack" || a.method == "baseline") {
    AttackOptions opts;
    opts.cover = parse_cover_backend(a.cover);
    opts.seed = glob.seed;
    opts.strict_unique = a.strict_unique;
    opts.budget = a.budget;
    if (a.method == "pathattack") {
      ConstraintSystem cs(g, path_edges(g, q.target_path));
      result = pathattack(g, EdgeMask(), q, opts, &cs);
      if (!a.dump_lp.empty()) {
        const fs::path lp = in_out_dir(glob, a.dump_lp);
        ensure_parent(lp);
        std::ofstream f(lp);
        cs.write_lp(f);
      }
    } else {
      result = baseline_greedy(g, EdgeMask(), q, opts);
    }
  } else if (a.method == "grasp") {
    small_graph_advisory(g);
    GraspConfig cfg;
    cfg.start_percentile = a.start_pct;
    cfg.decrement = a.decrement;
    cfg.scorer = parse_scorer(a.scorer);
    cfg.cover_backend = parse_cover_backend(a.cover);
    cfg.strict = a.strict_unique;
    cfg.seed = glob.seed;
    cfg.budget = a.budget;
    std::optional<ModelWeights> w;
    if (cfg.scorer == Scorer::kGat) {
      if (a.weights.empty()) throw ConfigError("--scorer gat needs --weights");
      w = load_weights(a.weights);
    }
    grasp = grasp_attack(g, q, cfg, w ? &*w : nullptr);
    result = grasp->attack;
    if (!a.trace.empty()) {
      const fs::path t = in_out_dir(glob, a.trace);
      ensure_parent(t);
      std::ofstream f(t);
      write_grasp_trace(grasp->trace, f);
    }
  } else {
    throw ConfigError("unknown method '" + a.method + "'");
  }

  std::vector<json> cut;
  for (EdgeId e : result.cut_edges) {
    const Edge& edge = g.edge(e);
    cut.push_back({{"edge", e}, {"u", edge.u}, {"v", edge.v},
                   {"cost", edge.cost}});
  }
  json out{{"method", a.method},
           {"valid", result.valid},
           {"edges_cut", result.cut_edges.size()},
           {"total_cost", result.total_cost},
           {"wall_time_ms", result.wall_time_ms},
           {"pathattack_calls", result.pathattack_calls},
           {"constraints_generated", result.constraints_generated},
           {"subproblem_edges", result.subproblem_edges},
           {"cut", cut}};
  if (grasp) {
    out["final_threshold"] = grasp->final_threshold;
    out["scoring_time_ms"] = grasp->scoring_time_ms;
    out["feature_time_ms"] = grasp->feature_time_ms;
    out["reduction_pct"] =
        g.edge_count() > 0
            ? 100.0 * (1.0 - double(result.subproblem_edges) / g.edge_count())
            : 0.0;
  }
  if (a.out.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    const fs::path p = in_out_dir(glob, a.out);
    ensure_parent(p);
    std::ofstream f(p);
    if (p.extension() == ".csv") {
      BenchRow row;
      row.instance_id = fs::path(a.instance).stem().string();
      row.family = "file";
      row.n = g.node_count();
      row.m = g.edge_count();
      row.method = a.method;
      if (grasp) row.scorer = a.scorer;
      if (a.method != "baseline") row.cover_backend = a.cover;
      row.seed = glob.seed;
      row.edges_cut = static_cast<int>(result.cut_edges.size());
      row.total_cost = result.total_cost;
      row.valid = result.valid &&
                  verify_target_shortest(g, result.cut_edges, q,
                                         a.strict_unique);
      row.wall_time_ms = result.wall_time_ms;
      row.subproblem_edges = result.subproblem_edges;
      row.reduction_pct =
          row.m > 0 ? 100.0 * (1.0 - double(row.subproblem_edges) / row.m)
                    : 0.0;
      row.pathattack_calls = result.pathattack_calls;
      if (grasp) {
        row.feature_time_ms = grasp->feature_time_ms;
        row.final_threshold = grasp->final_threshold;
      }
      write_bench_csv({row}, f);
    } else {
      f << out.dump(2) << "\n";
    }
    std::cout << "valid=" << (result.valid ? "true" : "false")
              << " edges_cut=" << result.cut_edges.size()
              << " total_cost=" << result.total_cost << " -> " << p.string()
              << "\n";
  }
  return result.valid ? 0 : 1;
}

// ---- bench / scaling / summarize ----

void write_rows(const std::vector<BenchRow>& rows, const fs::path& csv) {
  ensure_parent(csv);
  std::ofstream f(csv);
  if (!f) throw ConfigError("cannot write " + csv.string());
  write_bench_csv(rows, f);
  int failures = 0;
  for (const BenchRow& r : rows) failures += r.error.empty() ? 0 : 1;
  if (failures > 0) {
    fs::path side = csv;
    side += ".errors.jsonl";
    std::ofstream e(side);
    write_error_sidecar(rows, e);
    std::cerr << failures << " failed rows; see " << side.string() << "\n";
  }
  std::cout << "wrote " << rows.size() << " rows to " << csv.string() << "\n";
}

struct BenchArgs {
  std::string suite;
  std::string out = "bench.csv";
};

int run_bench(const Globals& glob, const BenchArgs& a, bool threads_set,
              bool seed_set) {
  SuiteConfig cfg = load_suite(a.suite);
  if (threads_set) cfg.threads = glob.threads;
  if (seed_set) cfg.seed = glob.seed;
  write_rows(run_suite(cfg), in_out_dir(glob, a.out));
  return 0;
}

struct ScalingArgs {
  std::vector<int> sizes{500, 1000, 2000};
  int m = 7;
  int instances = 5;
  int k_star = 100;
  std::string scorer = "detour";
  std::string weights;
  std::string out = "scaling.csv";
};

int run_scaling(const Globals& glob, const ScalingArgs& a) {
  ScalingConfig cfg;
  cfg.sizes = a.sizes;
  cfg.m = a.m;
  cfg.instances = a.instances;
  cfg.seed = glob.seed;
  cfg.k_star = a.k_star;
  cfg.scorer = parse_scorer(a.scorer);
  if (!a.weights.empty()) cfg.weights = fs::path(a.weights);
  cfg.threads = glob.threads;
  write_rows(scaling_run(cfg), in_out_dir(glob, a.out));
  return 0;
}

struct SummarizeArgs {
  std::string csv;
};

int run_summarize(const Globals& glob, const SummarizeArgs& a) {
  std::ifstream in(a.csv);
  if (!in) throw ConfigError("cannot open " + a.csv);
  std::vector<BenchRow> rows = read_bench_csv(in);
  std::vector<SummaryGroup> groups = summarize(rows);
  fs::create_directories(glob.out_dir);
  const fs::path table = fs::path(glob.out_dir) / "summary.csv";
  std::ofstream f(table);
  write_summary_csv(groups, f);
  std::cout << "wrote " << table.string() << " (" << groups.size()
            << " groups)\n";
  for (const fs::path& p : write_summary_plots(groups, glob.out_dir)) {
    std::cout << "wrote " << p.string() << "\n";
  }
  return 0;
}

struct InitWeightsArgs {
  int input_dim = kStructuralColumns + 1 + kPprPadWidth;
  std::string out = "weights.json";
};

int run_init_weights(const Globals& glob, const InitWeightsArgs& a) {
  ModelWeights w = make_random_weights(a.input_dim, glob.seed);
  const fs::path p = in_out_dir(glob, a.out);
  ensure_parent(p);
  save_weights(w, p);
  std::cout << "wrote " << p.string() << " (" << w.parameter_count()
            << " parameters)\n";
  return 0;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const InfeasibleError*>(&e)) return 3;
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Force a chosen path to be the shortest by cutting edges"};
  app.require_subcommand(1);
  Globals glob;
  auto* seed_opt = app.add_option("--seed", glob.seed, "Base random seed");
  auto* threads_opt =
      app.add_option("--threads", glob.threads, "Worker threads")
          ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", glob.out_dir, "Directory for outputs");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a graph and instance");
  gen_cmd->add_option("--family", gen.family, "lattice | er | ba | ws")
      ->check(CLI::IsMember({"lattice", "er", "ba", "ws"}));
  gen_cmd->add_option("--n", gen.n, "Node count");
  gen_cmd->add_option("--p", gen.p, "ER edge probability");
  gen_cmd->add_option("--m", gen.m, "BA edges per new node");
  gen_cmd->add_option("--k", gen.k, "WS ring neighbours");
  gen_cmd->add_option("--rows", gen.rows, "Lattice rows");
  gen_cmd->add_option("--cols", gen.cols, "Lattice columns");
  gen_cmd->add_option("--k-star", gen.k_star, "Rank of p* among s-t paths");
  gen_cmd->add_option("--name", gen.name, "Output file stem");

  FeatureArgs feat;
  auto* feat_cmd = app.add_subcommand("features", "Write node features");
  feat_cmd->add_option("--instance", feat.instance)->required();
  feat_cmd->add_option("--families", feat.families,
                       "all or a list of structural,flow,ppr");
  feat_cmd->add_flag("--raw", feat.raw, "Skip z-score normalization");
  feat_cmd->add_option("--out", feat.out, "CSV path");

  AttackArgs atk;
  auto* atk_cmd = app.add_subcommand("attack", "Attack one instance");
  atk_cmd->add_option("--instance", atk.instance)->required();
  atk_cmd->add_option("--method", atk.method)
      ->check(CLI::IsMember({"pathattack", "baseline", "grasp"}));
  atk_cmd->add_option("--cover", atk.cover)
      ->check(CLI::IsMember({"greedy", "lp"}));
  atk_cmd->add_option("--scorer", atk.scorer)
      ->check(CLI::IsMember({"gat", "detour", "constant"}));
  atk_cmd->add_option("--weights", atk.weights, "Model weight file");
  atk_cmd->add_option("--start-pct", atk.start_pct);
  atk_cmd->add_option("--decrement", atk.decrement);
  atk_cmd->add_flag("--strict-unique", atk.strict_unique,
                    "Require p* to be the unique shortest path");
  atk_cmd->add_option("--budget", atk.budget, "Maximum total cut cost");
  atk_cmd->add_option("--out", atk.out,
                      "Result file, .json or .csv (default: JSON on stdout)");
  atk_cmd->add_option("--dump-lp", atk.dump_lp, "Write the final LP");
  atk_cmd->add_option("--trace", atk.trace, "GRASP trace (JSON lines)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  bench_cmd->add_option("--suite", bench.suite, "Suite JSON")->required();
  bench_cmd->add_option("--out", bench.out, "CSV path");

  ScalingArgs scal;
  auto* scal_cmd = app.add_subcommand("scaling", "BA size sweep");
  scal_cmd->add_option("--sizes", scal.sizes)->delimiter(',');
  scal_cmd->add_option("--m", scal.m);
  scal_cmd->add_option("--instances", scal.instances);
  scal_cmd->add_option("--k-star", scal.k_star);
  scal_cmd->add_option("--scorer", scal.scorer)
      ->check(CLI::IsMember({"gat", "detour", "constant"}));
  scal_cmd->add_option("--weights", scal.weights);
  scal_cmd->add_option("--out", scal.out);

  SummarizeArgs summ;
  auto* summ_cmd =
      app.add_subcommand("summarize", "Summary table and SVG plots");
  summ_cmd->add_option("--csv", summ.csv)->required();

  InitWeightsArgs initw;
  auto* initw_cmd = app.add_subcommand(
      "init-weights", "Write seeded random model weights");
  initw_cmd->add_option("--input-dim", initw.input_dim);
  initw_cmd->add_option("--out", initw.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return run_gen(glob, gen);
    if (*feat_cmd) return run_features(glob, feat);
    if (*atk_cmd) return run_attack(glob, atk);
    if (*bench_cmd) {
      return run_bench(glob, bench, threads_opt->count() > 0,
                       seed_opt->count() > 0);
    }
    if (*scal_cmd) return run_scaling(glob, scal);
    if (*summ_cmd) return run_summarize(glob, summ);
    if (*initw_cmd) return run_init_weights(glob, initw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
