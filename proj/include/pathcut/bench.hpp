#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathcut/attack.hpp"
#include "pathcut/gat.hpp"
#include "pathcut/grasp.hpp"
#include "pathcut/synthgen.hpp"

namespace pathcut {

struct BenchRow {
  std::string instance_id;
  std::string family;
  int n = 0;
  int m = 0;
  std::string method;
  std::string scorer = "-";
  std::string features = "-";
  std::string cover_backend = "-";
  std::uint64_t seed = 0;
  int edges_cut = 0;
  double total_cost = 0.0;
  bool valid = false;
  double wall_time_ms = 0.0;  // includes feature time
  double feature_time_ms = 0.0;
  int subproblem_edges = 0;
  double reduction_pct = 0.0;
  int pathattack_calls = 0;
  double final_threshold = 0.0;

  // Not a CSV column; failures are listed in the error sidecar.
  std::string error;
  std::string error_message;
};

// Column names in CSV order.
const std::vector<std::string>& bench_columns();

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);
// Throws ParseError on a header mismatch or malformed field.
std::vector<BenchRow> read_bench_csv(std::istream& in);
// Rows with an error tag as JSON lines.
void write_error_sidecar(const std::vector<BenchRow>& rows, std::ostream& out);

struct MethodSpec {
  std::string method = "pathattack";  // pathattack | baseline | grasp
  CoverBackend cover = CoverBackend::kGreedy;
  Scorer scorer = Scorer::kDetour;  // grasp only
  double start_percentile = 95.0;
  double decrement = 10.0;

  std::string label() const;
};

struct SyntheticSpec {
  Family family = Family::kEr;
  int n = 1000;
  int graphs = 1;
  int instances = 1;  // per graph
  // Explicit family parameters; unset ones are drawn from the benchmark
  // ranges.
  std::optional<double> p;
  std::optional<int> m;
  std::optional<int> k;
  std::optional<int> rows;
  std::optional<int> cols;
};

struct GraphFileSpec {
  std::string name;
  std::filesystem::path path;
  int instances = 1;
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  int k_star = 100;
  bool strict = false;
  std::vector<SyntheticSpec> synthetic;
  std::vector<GraphFileSpec> graph_files;
  std::vector<MethodSpec> methods;
  std::optional<std::filesystem::path> weights;
  int threads = 1;
};

// Schema:
//   {"seed": 1, "k_star": 100, "strict": false, "threads": 1,
//    "weights": "model.json",
//    "families": [{"family": "ba", "n": 1000, "graphs": 15, "instances": 1,
//                  "m": 7}],
//    "graphs": [{"name": "road", "path": "road.tsv", "instances": 15}],
//    "methods": [{"method": "grasp", "scorer": "detour", "cover": "greedy",
//                 "start_pct": 95, "decrement": 10}]}
// Relative paths resolve against `base_dir`. Throws ConfigError.
SuiteConfig suite_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir = {});
SuiteConfig load_suite(const std::filesystem::path& path);

// Runs every method on every instance. Rows come out in (instance, method)
// order regardless of thread count. Failures become rows with valid = false
// and an error tag. Throws ConfigError when a graph file cannot be read.
std::vector<BenchRow> run_suite(const SuiteConfig& cfg);

// Runs one method on one instance and re-checks the outcome with
// verify_target_shortest before filling `valid`.
BenchRow run_method(const WeightedGraph& g, const PathQuery& q,
                    const MethodSpec& spec, std::uint64_t seed, bool strict,
                    const ModelWeights* weights);

// Validity re-check written independently of the attack code: label-
// correcting distances to the target, then a smallest-neighbor walk from the
// source along tight edges must reproduce p*; no p* edge may be cut. In
// strict mode the number of shortest paths must also be exactly one.
bool verify_target_shortest(const WeightedGraph& g,
                            const std::vector<EdgeId>& cut,
                            const PathQuery& q, bool strict = false);

struct ScalingConfig {
  std::vector<int> sizes{500, 1000, 2000};
  int m = 7;
  int instances = 5;
  std::uint64_t seed = 1;
  int k_star = 100;
  Scorer scorer = Scorer::kDetour;
  std::optional<std::filesystem::path> weights;
  int threads = 1;
};

// BA graphs with fixed m across sizes; pathattack and grasp per instance.
std::vector<BenchRow> scaling_run(const ScalingConfig& cfg);

// Quantile with linear interpolation between order statistics
// (position q * (n - 1)).
double quantile(std::vector<double> values, double q);

struct MetricSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
};

struct SummaryGroup {
  std::string family;
  int n = 0;
  std::string method;
  std::string scorer;
  std::string features;
  std::string cover_backend;
  int count = 0;
  int valid_count = 0;
  std::map<std::string, MetricSummary> metrics;

  std::string variant() const;
};

// Metrics summarized per group.
const std::vector<std::string>& summary_metrics();

// Groups by (family, n, method, scorer, features, cover_backend) in order of
// first appearance.
std::vector<SummaryGroup> summarize(const std::vector<BenchRow>& rows);
void write_summary_csv(const std::vector<SummaryGroup>& groups,
                       std::ostream& out);
// Bar charts per metric (median with IQR whiskers) and, for families seen at
// several sizes, line charts over n. Returns the written files; nothing is
// written for an empty summary.
std::vector<std::filesystem::path> write_summary_plots(
    const std::vector<SummaryGroup>& groups,
    const std::filesystem::path& out_dir);

}  // namespace pathcut
