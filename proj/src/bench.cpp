#include "pathcut/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <deque>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>

#include "pathcut/errors.hpp"
#include "pathcut/graph_io.hpp"
#include "pathcut/paths.hpp"

namespace pathcut {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') c = '_';
  }
  return s;
}

template <typename T>
T parse_number(const std::string& field, const std::string& column,
               int line) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("bad value '" + field + "' in column " + column, line);
  }
  return value;
}

double parse_double_field(const std::string& field, const std::string& column,
                          int line) {
  if (field == "nan") return std::nan("");
  if (field == "inf") return INFINITY;
  return parse_number<double>(field, column, line);
}

std::string families_label(const std::vector<FeatureFamily>& fams) {
  std::string out;
  for (FeatureFamily f : fams) {
    if (!out.empty()) out += "+";
    out += to_string(f);
  }
  return out;
}

// One unit of suite work: a graph and the instances drawn from it.
struct GraphJob {
  std::string label;
  std::string family;
  std::uint64_t seed = 0;
  int instances = 1;
  std::optional<GeneratorParams> params;   // synthetic
  const WeightedGraph* loaded = nullptr;   // graph file
};

std::string classify(const std::exception& e) {
  if (dynamic_cast<const InfeasibleError*>(&e)) return "infeasible";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric";
  if (dynamic_cast<const SamplingError*>(&e)) return "sampling";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  return "error";
}

BenchRow failure_row(const MethodSpec& spec, const WeightedGraph* g,
                     std::uint64_t seed, const std::string& tag,
                     const std::string& message) {
  BenchRow row;
  row.method = spec.method;
  if (spec.method == "grasp") row.scorer = to_string(spec.scorer);
  if (spec.method != "baseline") row.cover_backend = to_string(spec.cover);
  if (g) {
    row.n = g->node_count();
    row.m = g->edge_count();
  }
  row.seed = seed;
  row.valid = false;
  row.error = tag;
  row.error_message = message;
  return row;
}

std::vector<BenchRow> run_graph_job(const GraphJob& job,
                                    const SuiteConfig& cfg,
                                    const ModelWeights* weights) {
  std::vector<BenchRow> rows;
  WeightedGraph generated;
  const WeightedGraph* g = job.loaded;
  if (!g) {
    generated = generate(*job.params);
    g = &generated;
  }
  for (int i = 0; i < job.instances; ++i) {
    const std::uint64_t seed = derive_seed(job.seed, 0x696e7374, i);
    const std::string id = job.label + "-i" + std::to_string(i);
    std::optional<PathQuery> q;
    std::string tag, message;
    try {
      q = sample_instance(*g, cfg.k_star, seed);
    } catch (const std::exception& e) {
      tag = classify(e);
      message = e.what();
    }
    for (const MethodSpec& spec : cfg.methods) {
      BenchRow row = q ? run_method(*g, *q, spec, seed, cfg.strict, weights)
                       : failure_row(spec, g, seed, tag, message);
      row.instance_id = id;
      row.family = job.family;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---- SVG ----

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                          "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                          "#9c755f", "#bab0ac"};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_ceiling(double v) {
  if (!(v > 0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (step * mag >= v) return step * mag;
  }
  return 10.0 * mag;
}

struct Frame {
  double width = 720, height = 420;
  double left = 70, right = 190, top = 40, bottom = 60;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void svg_axes(std::ostream& out, const Frame& f, double ymax,
              const std::string& title, const std::string& ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width
      << "\" height=\"" << f.height << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << f.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << xml_escape(title) << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = ymax * i / 5;
    const double y = f.top + f.plot_h() * (1 - double(i) / 5);
    out << "<line x1=\"" << f.left << "\" x2=\"" << f.left + f.plot_w()
        << "\" y1=\"" << y << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << f.left - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\">" << fmt(std::round(v * 1000) / 1000)
        << "</text>\n";
  }
  out << "<line x1=\"" << f.left << "\" x2=\"" << f.left << "\" y1=\""
      << f.top << "\" y2=\"" << f.top + f.plot_h()
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << f.left << "\" x2=\"" << f.left + f.plot_w()
      << "\" y1=\"" << f.top + f.plot_h() << "\" y2=\""
      << f.top + f.plot_h() << "\" stroke=\"black\"/>\n";
  out << "<text transform=\"translate(16," << f.top + f.plot_h() / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(ylabel)
      << "</text>\n";
}

void svg_legend(std::ostream& out, const Frame& f,
                const std::vector<std::string>& series) {
  const double x = f.left + f.plot_w() + 14;
  for (size_t i = 0; i < series.size(); ++i) {
    const double y = f.top + 8 + 20 * double(i);
    out << "<rect x=\"" << x << "\" y=\"" << y - 10
        << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[i % 10]
        << "\"/>\n";
    out << "<text x=\"" << x + 18 << "\" y=\"" << y << "\">"
        << xml_escape(series[i]) << "</text>\n";
  }
}

void bar_chart(const std::vector<SummaryGroup>& groups,
               const std::string& metric, const std::filesystem::path& file) {
  std::vector<std::string> categories, series;
  auto category_of = [](const SummaryGroup& g) {
    return g.family + " n=" + std::to_string(g.n);
  };
  for (const SummaryGroup& g : groups) {
    if (std::find(categories.begin(), categories.end(), category_of(g)) ==
        categories.end()) {
      categories.push_back(category_of(g));
    }
    if (std::find(series.begin(), series.end(), g.variant()) == series.end()) {
      series.push_back(g.variant());
    }
  }
  double ymax = 0;
  for (const SummaryGroup& g : groups) {
    auto it = g.metrics.find(metric);
    if (it != g.metrics.end()) ymax = std::max(ymax, it->second.q3);
  }
  ymax = nice_ceiling(ymax);

  Frame f;
  std::ofstream out(file);
  svg_axes(out, f, ymax, metric + " (median, IQR)", metric);
  const double slot = f.plot_w() / categories.size();
  const double bar = slot * 0.8 / series.size();
  auto y_of = [&](double v) { return f.top + f.plot_h() * (1 - v / ymax); };
  for (const SummaryGroup& g : groups) {
    auto it = g.metrics.find(metric);
    if (it == g.metrics.end()) continue;
    const size_t c = std::find(categories.begin(), categories.end(),
                               category_of(g)) - categories.begin();
    const size_t s =
        std::find(series.begin(), series.end(), g.variant()) - series.begin();
    const double x = f.left + slot * c + slot * 0.1 + bar * s;
    const MetricSummary& m = it->second;
    out << "<rect x=\"" << x << "\" y=\"" << y_of(m.median) << "\" width=\""
        << bar * 0.9 << "\" height=\"" << f.top + f.plot_h() - y_of(m.median)
        << "\" fill=\"" << kPalette[s % 10] << "\"/>\n";
    const double cx = x + bar * 0.45;
    out << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << y_of(m.q1)
        << "\" y2=\"" << y_of(m.q3) << "\" stroke=\"black\"/>\n";
  }
  for (size_t c = 0; c < categories.size(); ++c) {
    out << "<text x=\"" << f.left + slot * (c + 0.5) << "\" y=\""
        << f.top + f.plot_h() + 18 << "\" text-anchor=\"middle\">"
        << xml_escape(categories[c]) << "</text>\n";
  }
  svg_legend(out, f, series);
  out << "</svg>\n";
}

void line_chart(const std::vector<SummaryGroup>& groups,
                const std::string& family, const std::string& metric,
                const std::filesystem::path& file) {
  std::vector<std::string> series;
  std::set<int> sizes;
  double ymax = 0;
  for (const SummaryGroup& g : groups) {
    if (g.family != family) continue;
    auto it = g.metrics.find(metric);
    if (it == g.metrics.end()) continue;
    sizes.insert(g.n);
    ymax = std::max(ymax, it->second.q3);
    if (std::find(series.begin(), series.end(), g.variant()) == series.end()) {
      series.push_back(g.variant());
    }
  }
  ymax = nice_ceiling(ymax);
  const double xmin = *sizes.begin();
  const double xmax = *sizes.rbegin();

  Frame f;
  std::ofstream out(file);
  svg_axes(out, f, ymax, family + ": " + metric + " vs n", metric);
  auto x_of = [&](double n) {
    return f.left + f.plot_w() * (xmax > xmin ? (n - xmin) / (xmax - xmin) : 0.5);
  };
  auto y_of = [&](double v) { return f.top + f.plot_h() * (1 - v / ymax); };
  for (int n : sizes) {
    out << "<text x=\"" << x_of(n) << "\" y=\"" << f.top + f.plot_h() + 18
        << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  for (size_t s = 0; s < series.size(); ++s) {
    std::string points;
    for (const SummaryGroup& g : groups) {
      if (g.family != family || g.variant() != series[s]) continue;
      auto it = g.metrics.find(metric);
      if (it == g.metrics.end()) continue;
      points += fmt(x_of(g.n)) + "," + fmt(y_of(it->second.median)) + " ";
      out << "<circle cx=\"" << x_of(g.n) << "\" cy=\""
          << y_of(it->second.median) << "\" r=\"3\" fill=\""
          << kPalette[s % 10] << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 10]
        << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
  }
  svg_legend(out, f, series);
  out << "</svg>\n";
}

MethodSpec method_from_json(const json& j) {
  MethodSpec m;
  m.method = j.value("method", std::string("pathattack"));
  if (m.method != "pathattack" && m.method != "baseline" &&
      m.method != "grasp") {
    throw ConfigError("unknown method '" + m.method + "'");
  }
  m.cover = parse_cover_backend(j.value("cover", std::string("greedy")));
  m.scorer = parse_scorer(j.value("scorer", std::string("detour")));
  m.start_percentile = j.value("start_pct", 95.0);
  m.decrement = j.value("decrement", 10.0);
  if (m.method == "grasp") {
    GraspConfig probe;
    probe.start_percentile = m.start_percentile;
    probe.decrement = m.decrement;
    probe.validate();
  }
  return m;
}

}  // namespace

const std::vector<std::string>& bench_columns() {
  static const std::vector<std::string> cols{
      "instance_id",      "family",           "n",
      "m",                "method",           "scorer",
      "features",         "cover_backend",    "seed",
      "edges_cut",        "total_cost",       "valid",
      "wall_time_ms",     "feature_time_ms",  "subproblem_edges",
      "reduction_pct",    "pathattack_calls", "final_threshold"};
  return cols;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  const auto& cols = bench_columns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const BenchRow& r : rows) {
    out << sanitize(r.instance_id) << ',' << sanitize(r.family) << ',' << r.n
        << ',' << r.m << ',' << r.method << ',' << r.scorer << ','
        << r.features << ',' << r.cover_backend << ',' << r.seed << ','
        << r.edges_cut << ',' << fmt(r.total_cost) << ','
        << (r.valid ? "true" : "false") << ',' << fmt(r.wall_time_ms) << ','
        << fmt(r.feature_time_ms) << ',' << r.subproblem_edges << ','
        << fmt(r.reduction_pct) << ',' << r.pathattack_calls << ','
        << fmt(r.final_threshold) << "\n";
  }
}

std::vector<BenchRow> read_bench_csv(std::istream& in) {
  std::vector<BenchRow> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  const auto& cols = bench_columns();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = split_csv(line);
    if (!header_seen) {
      if (f != cols) throw ParseError("CSV header does not match", line_no);
      header_seen = true;
      continue;
    }
    if (f.size() != cols.size()) {
      throw ParseError("expected " + std::to_string(cols.size()) +
                           " fields, got " + std::to_string(f.size()),
                       line_no);
    }
    BenchRow r;
    r.instance_id = f[0];
    r.family = f[1];
    r.n = parse_number<int>(f[2], "n", line_no);
    r.m = parse_number<int>(f[3], "m", line_no);
    r.method = f[4];
    r.scorer = f[5];
    r.features = f[6];
    r.cover_backend = f[7];
    r.seed = parse_number<std::uint64_t>(f[8], "seed", line_no);
    r.edges_cut = parse_number<int>(f[9], "edges_cut", line_no);
    r.total_cost = parse_double_field(f[10], "total_cost", line_no);
    if (f[11] == "true" || f[11] == "1") {
      r.valid = true;
    } else if (f[11] == "false" || f[11] == "0") {
      r.valid = false;
    } else {
      throw ParseError("bad value '" + f[11] + "' in column valid", line_no);
    }
    r.wall_time_ms = parse_double_field(f[12], "wall_time_ms", line_no);
    r.feature_time_ms = parse_double_field(f[13], "feature_time_ms", line_no);
    r.subproblem_edges = parse_number<int>(f[14], "subproblem_edges", line_no);
    r.reduction_pct = parse_double_field(f[15], "reduction_pct", line_no);
    r.pathattack_calls = parse_number<int>(f[16], "pathattack_calls", line_no);
    r.final_threshold = parse_double_field(f[17], "final_threshold", line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_error_sidecar(const std::vector<BenchRow>& rows,
                         std::ostream& out) {
  for (const BenchRow& r : rows) {
    if (r.error.empty()) continue;
    out << json{{"instance_id", r.instance_id},
                {"method", r.method},
                {"scorer", r.scorer},
                {"cover_backend", r.cover_backend},
                {"seed", r.seed},
                {"error", r.error},
                {"message", r.error_message}}
               .dump()
        << "\n";
  }
}

std::string MethodSpec::label() const {
  if (method == "baseline") return "baseline";
  if (method == "pathattack") return "pathattack/" + to_string(cover);
  return "grasp/" + to_string(scorer) + "/" + to_string(cover);
}

SuiteConfig suite_from_json(const json& j,
                            const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("suite config must be a JSON object");
  SuiteConfig cfg;
  try {
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.k_star = j.value("k_star", 100);
    cfg.strict = j.value("strict", false);
    cfg.threads = j.value("threads", 1);
    if (j.contains("weights") && !j.at("weights").is_null()) {
      std::filesystem::path w = j.at("weights").get<std::string>();
      cfg.weights = w.is_absolute() ? w : base_dir / w;
    }
    if (j.contains("families")) {
      for (const json& fj : j.at("families")) {
        SyntheticSpec s;
        s.family = parse_family(fj.at("family").get<std::string>());
        s.n = fj.value("n", 1000);
        s.graphs = fj.value("graphs", 1);
        s.instances = fj.value("instances", 1);
        if (fj.contains("p")) s.p = fj.at("p").get<double>();
        if (fj.contains("m")) s.m = fj.at("m").get<int>();
        if (fj.contains("k")) s.k = fj.at("k").get<int>();
        if (fj.contains("rows")) s.rows = fj.at("rows").get<int>();
        if (fj.contains("cols")) s.cols = fj.at("cols").get<int>();
        if (s.graphs < 0 || s.instances < 0) {
          throw ConfigError("graphs and instances must be >= 0");
        }
        cfg.synthetic.push_back(s);
      }
    }
    if (j.contains("graphs")) {
      for (const json& gj : j.at("graphs")) {
        GraphFileSpec s;
        std::filesystem::path p = gj.at("path").get<std::string>();
        s.path = p.is_absolute() ? p : base_dir / p;
        s.name = gj.value("name", s.path.stem().string());
        s.instances = gj.value("instances", 1);
        cfg.graph_files.push_back(s);
      }
    }
    if (j.contains("methods")) {
      for (const json& mj : j.at("methods")) {
        cfg.methods.push_back(method_from_json(mj));
      }
    } else {
      cfg.methods = {MethodSpec{}};
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed suite config: ") + e.what());
  }
  if (cfg.k_star < 1) throw ConfigError("k_star must be >= 1");
  return cfg;
}

SuiteConfig load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open suite config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("suite config is not valid JSON: " +
                      std::string(e.what()));
  }
  return suite_from_json(j, path.parent_path());
}

bool verify_target_shortest(const WeightedGraph& g,
                            const std::vector<EdgeId>& cut,
                            const PathQuery& q, bool strict) {
  const int n = g.node_count();
  std::vector<char> removed(g.edge_count(), 0);
  for (EdgeId e : cut) {
    if (e < 0 || e >= g.edge_count()) return false;
    removed[e] = 1;
  }
  const auto& target = q.target_path.nodes;
  if (target.empty() || target.front() != q.source ||
      target.back() != q.target) {
    return false;
  }
  for (size_t i = 0; i + 1 < target.size(); ++i) {
    const auto e = g.find_edge(target[i], target[i + 1]);
    if (!e || removed[*e]) return false;
  }

  // Label-correcting distances to the target (FIFO queue).
  std::vector<double> dist(n, kInfinity);
  std::vector<char> queued(n, 0);
  std::deque<NodeId> work{q.target};
  dist[q.target] = 0.0;
  queued[q.target] = 1;
  while (!work.empty()) {
    const NodeId v = work.front();
    work.pop_front();
    queued[v] = 0;
    for (const Incidence& inc : g.neighbors(v)) {
      if (removed[inc.edge]) continue;
      const double nd = dist[v] + g.edge(inc.edge).weight;
      if (nd < dist[inc.neighbor]) {
        dist[inc.neighbor] = nd;
        if (!queued[inc.neighbor]) {
          queued[inc.neighbor] = 1;
          work.push_back(inc.neighbor);
        }
      }
    }
  }
  if (dist[q.source] == kInfinity) return false;

  auto tight = [&](NodeId from, const Incidence& inc) {
    return !removed[inc.edge] && dist[inc.neighbor] < kInfinity &&
           lengths_tie(dist[inc.neighbor] + g.edge(inc.edge).weight,
                       dist[from]);
  };

  // Smallest tight neighbor at each step gives the lexicographically
  // smallest shortest path.
  std::vector<NodeId> walk{q.source};
  NodeId cur = q.source;
  while (cur != q.target) {
    NodeId next = kNoNode;
    for (const Incidence& inc : g.neighbors(cur)) {
      if (tight(cur, inc) && (next == kNoNode || inc.neighbor < next)) {
        next = inc.neighbor;
      }
    }
    if (next == kNoNode || walk.size() > size_t(n)) return false;
    walk.push_back(next);
    cur = next;
  }
  if (walk != target) return false;
  if (!strict) return true;

  // Count shortest paths to the target, capped at 2, in increasing distance.
  std::vector<NodeId> order;
  for (NodeId v = 0; v < n; ++v) {
    if (dist[v] < kInfinity) order.push_back(v);
  }
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return dist[a] < dist[b]; });
  std::vector<int> count(n, 0);
  count[q.target] = 1;
  for (NodeId v : order) {
    if (v == q.target) continue;
    int c = 0;
    for (const Incidence& inc : g.neighbors(v)) {
      if (tight(v, inc)) c = std::min(2, c + count[inc.neighbor]);
    }
    count[v] = c;
  }
  return count[q.source] == 1;
}

BenchRow run_method(const WeightedGraph& g, const PathQuery& q,
                    const MethodSpec& spec, std::uint64_t seed, bool strict,
                    const ModelWeights* weights) {
  BenchRow row;
  row.n = g.node_count();
  row.m = g.edge_count();
  row.method = spec.method;
  row.seed = seed;
  if (spec.method != "baseline") row.cover_backend = to_string(spec.cover);
  if (spec.method == "grasp") {
    row.scorer = to_string(spec.scorer);
    if (spec.scorer == Scorer::kGat && weights) {
      row.features = families_label(weights->feature_families());
    }
  }

  try {
    AttackResult result;
    if (spec.method == "pathattack" || spec.method == "baseline") {
      AttackOptions opts;
      opts.cover = spec.cover;
      opts.seed = seed;
      opts.strict_unique = strict;
      result = spec.method == "pathattack"
                   ? pathattack(g, EdgeMask(), q, opts)
                   : baseline_greedy(g, EdgeMask(), q, opts);
      row.final_threshold = 0.0;
    } else if (spec.method == "grasp") {
      GraspConfig cfg;
      cfg.start_percentile = spec.start_percentile;
      cfg.decrement = spec.decrement;
      cfg.scorer = spec.scorer;
      cfg.cover_backend = spec.cover;
      cfg.strict = strict;
      cfg.seed = seed;
      GraspResult gr = grasp_attack(g, q, cfg, weights);
      result = gr.attack;
      row.feature_time_ms = gr.feature_time_ms;
      row.final_threshold = gr.final_threshold;
    } else {
      throw ConfigError("unknown method '" + spec.method + "'");
    }
    row.edges_cut = static_cast<int>(result.cut_edges.size());
    row.total_cost = result.total_cost;
    row.wall_time_ms = result.wall_time_ms;
    row.subproblem_edges = result.subproblem_edges;
    row.reduction_pct =
        row.m > 0 ? 100.0 * (1.0 - double(result.subproblem_edges) / row.m)
                  : 0.0;
    row.pathattack_calls = result.pathattack_calls;
    const bool verified = verify_target_shortest(g, result.cut_edges, q, strict);
    row.valid = result.valid && verified;
    if (!verified) {
      row.error = "verify_failed";
      row.error_message = "independent re-check rejected the cut set";
    }
  } catch (const std::exception& e) {
    row.valid = false;
    row.error = classify(e);
    row.error_message = e.what();
  }
  return row;
}

std::vector<BenchRow> run_suite(const SuiteConfig& cfg) {
  std::optional<ModelWeights> weights;
  const bool needs_weights =
      std::any_of(cfg.methods.begin(), cfg.methods.end(), [](const auto& m) {
        return m.method == "grasp" && m.scorer == Scorer::kGat;
      });
  if (needs_weights) {
    if (!cfg.weights) throw ConfigError("gat scorer needs a weight file");
    weights = load_weights(*cfg.weights);
  }

  std::vector<WeightedGraph> loaded;
  loaded.reserve(cfg.graph_files.size());
  for (const GraphFileSpec& spec : cfg.graph_files) {
    try {
      EdgeListOptions opts;
      opts.remap_ids = true;
      loaded.push_back(load_edge_list(spec.path, opts).graph);
    } catch (const std::exception& e) {
      throw ConfigError("cannot read graph " + spec.path.string() + ": " +
                        e.what());
    }
  }

  std::vector<GraphJob> jobs;
  for (size_t si = 0; si < cfg.synthetic.size(); ++si) {
    const SyntheticSpec& s = cfg.synthetic[si];
    for (int gi = 0; gi < s.graphs; ++gi) {
      GraphJob job;
      job.seed = derive_seed(cfg.seed, si, gi);
      GeneratorParams params = sample_benchmark_params(s.family, s.n, job.seed);
      if (s.p) params.p = *s.p;
      if (s.m) params.m = *s.m;
      if (s.k) params.k = *s.k;
      if (s.rows) params.rows = *s.rows;
      if (s.cols) params.cols = *s.cols;
      job.params = params;
      job.family = to_string(s.family);
      job.label = job.family + "-n" + std::to_string(params.node_count()) +
                  "-s" + std::to_string(si) + "-g" + std::to_string(gi);
      job.instances = s.instances;
      jobs.push_back(std::move(job));
    }
  }
  for (size_t fi = 0; fi < cfg.graph_files.size(); ++fi) {
    GraphJob job;
    job.seed = derive_seed(cfg.seed, 0x66696c65, fi);
    job.family = sanitize(cfg.graph_files[fi].name);
    job.label = job.family;
    job.instances = cfg.graph_files[fi].instances;
    job.loaded = &loaded[fi];
    jobs.push_back(std::move(job));
  }

  std::vector<std::vector<BenchRow>> results(jobs.size());
  const ModelWeights* wp = weights ? &*weights : nullptr;
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_graph_job(jobs[i], cfg, wp);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<BenchRow> rows;
  for (auto& r : results) {
    for (auto& row : r) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BenchRow> scaling_run(const ScalingConfig& cfg) {
  SuiteConfig suite;
  suite.seed = cfg.seed;
  suite.k_star = cfg.k_star;
  suite.threads = cfg.threads;
  suite.weights = cfg.weights;
  for (int n : cfg.sizes) {
    SyntheticSpec s;
    s.family = Family::kBa;
    s.n = n;
    s.m = cfg.m;
    s.graphs = cfg.instances;
    s.instances = 1;
    suite.synthetic.push_back(s);
  }
  MethodSpec pa;
  pa.method = "pathattack";
  MethodSpec gr;
  gr.method = "grasp";
  gr.scorer = cfg.scorer;
  suite.methods = {pa, gr};
  return run_suite(suite);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * (values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

std::string SummaryGroup::variant() const {
  std::string v = method;
  if (scorer != "-") v += "/" + scorer;
  if (features != "-") v += "/" + features;
  if (cover_backend != "-") v += "/" + cover_backend;
  return v;
}

const std::vector<std::string>& summary_metrics() {
  static const std::vector<std::string> metrics{
      "edges_cut",       "total_cost",       "wall_time_ms",
      "feature_time_ms", "subproblem_edges", "reduction_pct",
      "pathattack_calls"};
  return metrics;
}

std::vector<SummaryGroup> summarize(const std::vector<BenchRow>& rows) {
  std::vector<SummaryGroup> groups;
  std::vector<std::vector<const BenchRow*>> members;
  for (const BenchRow& r : rows) {
    size_t gi = 0;
    for (; gi < groups.size(); ++gi) {
      const SummaryGroup& g = groups[gi];
      if (g.family == r.family && g.n == r.n && g.method == r.method &&
          g.scorer == r.scorer && g.features == r.features &&
          g.cover_backend == r.cover_backend) {
        break;
      }
    }
    if (gi == groups.size()) {
      SummaryGroup g;
      g.family = r.family;
      g.n = r.n;
      g.method = r.method;
      g.scorer = r.scorer;
      g.features = r.features;
      g.cover_backend = r.cover_backend;
      groups.push_back(g);
      members.emplace_back();
    }
    members[gi].push_back(&r);
  }
  auto metric_of = [](const BenchRow& r, const std::string& m) -> double {
    if (m == "edges_cut") return r.edges_cut;
    if (m == "total_cost") return r.total_cost;
    if (m == "wall_time_ms") return r.wall_time_ms;
    if (m == "feature_time_ms") return r.feature_time_ms;
    if (m == "subproblem_edges") return r.subproblem_edges;
    if (m == "reduction_pct") return r.reduction_pct;
    return r.pathattack_calls;
  };
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    SummaryGroup& g = groups[gi];
    g.count = static_cast<int>(members[gi].size());
    std::vector<const BenchRow*> valid;
    for (const BenchRow* r : members[gi]) {
      if (r->valid) valid.push_back(r);
    }
    g.valid_count = static_cast<int>(valid.size());
    if (valid.empty()) continue;
    for (const std::string& m : summary_metrics()) {
      std::vector<double> v;
      double sum = 0;
      for (const BenchRow* r : valid) {
        v.push_back(metric_of(*r, m));
        sum += v.back();
      }
      MetricSummary s;
      s.median = quantile(v, 0.5);
      s.q1 = quantile(v, 0.25);
      s.q3 = quantile(v, 0.75);
      s.mean = sum / v.size();
      g.metrics[m] = s;
    }
  }
  return groups;
}

void write_summary_csv(const std::vector<SummaryGroup>& groups,
                       std::ostream& out) {
  out << "family,n,method,scorer,features,cover_backend,count,valid_count";
  for (const std::string& m : summary_metrics()) {
    out << ',' << m << "_median," << m << "_q1," << m << "_q3," << m
        << "_mean";
  }
  out << "\n";
  for (const SummaryGroup& g : groups) {
    out << g.family << ',' << g.n << ',' << g.method << ',' << g.scorer << ','
        << g.features << ',' << g.cover_backend << ',' << g.count << ','
        << g.valid_count;
    for (const std::string& m : summary_metrics()) {
      auto it = g.metrics.find(m);
      if (it == g.metrics.end()) {
        out << ",,,,";
      } else {
        out << ',' << fmt(it->second.median) << ',' << fmt(it->second.q1)
            << ',' << fmt(it->second.q3) << ',' << fmt(it->second.mean);
      }
    }
    out << "\n";
  }
}

std::vector<std::filesystem::path> write_summary_plots(
    const std::vector<SummaryGroup>& groups,
    const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> files;
  if (groups.empty()) return files;
  std::filesystem::create_directories(out_dir);
  for (const std::string& metric :
       {std::string("reduction_pct"), std::string("edges_cut"),
        std::string("wall_time_ms")}) {
    auto file = out_dir / ("bars_" + metric + ".svg");
    bar_chart(groups, metric, file);
    files.push_back(file);
  }
  std::map<std::string, std::set<int>> sizes;
  for (const SummaryGroup& g : groups) {
    if (!g.metrics.empty()) sizes[g.family].insert(g.n);
  }
  for (const auto& [family, ns] : sizes) {
    if (ns.size() < 2) continue;
    for (const std::string& metric :
         {std::string("wall_time_ms"), std::string("reduction_pct")}) {
      auto file = out_dir / ("scaling_" + family + "_" + metric + ".svg");
      line_chart(groups, family, metric, file);
      files.push_back(file);
    }
  }
  return files;
}

}  // namespace pathcut
