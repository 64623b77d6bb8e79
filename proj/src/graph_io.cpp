#include "pathcut/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "pathcut/errors.hpp"

namespace pathcut {
namespace {

bool parse_double(const std::string& token, double* out) {
  try {
    size_t used = 0;
    *out = std::stod(token, &used);
    return used == token.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_node(const std::string& token, long long* out) {
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), *out);
  return ec == std::errc() && ptr == token.data() + token.size() && *out >= 0;
}

}  // namespace

LoadedGraph read_edge_list(std::istream& in, const EdgeListOptions& opts) {
  LoadedGraph out;
  std::unordered_map<std::string, NodeId> labels;
  std::vector<Edge> edges;
  long long max_id = -1;

  auto node_of = [&](const std::string& token, int line_no) -> NodeId {
    if (opts.remap_ids) {
      auto [it, inserted] =
          labels.emplace(token, static_cast<NodeId>(out.external_ids.size()));
      if (inserted) out.external_ids.push_back(token);
      return it->second;
    }
    long long id = 0;
    if (!parse_node(token, &id) || id > 0x7ffffffe) {
      throw ParseError("bad node id '" + token + "'", line_no);
    }
    max_id = std::max(max_id, id);
    return static_cast<NodeId>(id);
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.size() < 2 || tok.size() > 4) {
      throw ParseError("expected 2 to 4 fields, got " +
                           std::to_string(tok.size()),
                       line_no);
    }
    Edge e;
    e.u = node_of(tok[0], line_no);
    e.v = node_of(tok[1], line_no);
    if (tok.size() > 2 && !parse_double(tok[2], &e.weight)) {
      throw ParseError("bad weight '" + tok[2] + "'", line_no);
    }
    if (tok.size() > 3 && !parse_double(tok[3], &e.cost)) {
      throw ParseError("bad cost '" + tok[3] + "'", line_no);
    }
    if (!(e.weight > 0) || !(e.cost > 0)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": weight and cost must be positive");
    }
    if (e.u == e.v) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": self-loop");
    }
    edges.push_back(e);
  }

  int n = opts.remap_ids ? static_cast<int>(out.external_ids.size())
                         : static_cast<int>(max_id + 1);
  out.graph = WeightedGraph::FromEdges(n, std::move(edges));
  return out;
}

LoadedGraph load_edge_list(const std::filesystem::path& path,
                           const EdgeListOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list " + path.string());
  return read_edge_list(in, opts);
}

void write_edge_list(const WeightedGraph& g, std::ostream& out) {
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << "\n";
  out << std::setprecision(17);
  for (const Edge& e : g.edges()) {
    out << e.u << '\t' << e.v << '\t' << e.weight << '\t' << e.cost << '\n';
  }
}

void save_edge_list(const WeightedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_edge_list(g, out);
}

InstanceFile load_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("instance JSON: ") + e.what(), 0);
  }
  InstanceFile inst;
  try {
    inst.graph = j.at("graph").get<std::string>();
    inst.source = j.at("source").get<NodeId>();
    inst.target = j.at("target").get<NodeId>();
    inst.p_star = j.at("p_star").get<std::vector<NodeId>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what(), 0);
  }
  return inst;
}

void save_instance_file(const InstanceFile& inst,
                        const std::filesystem::path& path) {
  nlohmann::json j;
  j["graph"] = inst.graph;
  j["source"] = inst.source;
  j["target"] = inst.target;
  j["p_star"] = inst.p_star;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

LoadedInstance load_instance(const std::filesystem::path& path) {
  InstanceFile inst = load_instance_file(path);
  std::filesystem::path graph_path = inst.graph;
  if (graph_path.is_relative()) graph_path = path.parent_path() / graph_path;
  LoadedInstance out;
  out.graph = load_edge_list(graph_path).graph;
  out.query.source = inst.source;
  out.query.target = inst.target;
  out.query.target_path = make_path(out.graph, inst.p_star);
  validate_query(out.graph, out.query);
  return out;
}

}  // namespace pathcut
