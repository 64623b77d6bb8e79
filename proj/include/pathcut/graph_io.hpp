#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathcut/graph.hpp"

namespace pathcut {

struct EdgeListOptions {
  // When set, node tokens are arbitrary labels renumbered densely in order of
  // first appearance. Otherwise tokens must be non-negative integers and
  // node_count = 1 + max id.
  bool remap_ids = false;
};

struct LoadedGraph {
  WeightedGraph graph;
  // external_ids[v] is the original token for dense id v (only with remap_ids).
  std::vector<std::string> external_ids;
};

// Format: one edge per line, `u <TAB> v [<TAB> weight [<TAB> cost]]`.
// Any whitespace separates fields; blank lines and lines starting with '#'
// are skipped.
LoadedGraph read_edge_list(std::istream& in, const EdgeListOptions& opts = {});
LoadedGraph load_edge_list(const std::filesystem::path& path,
                           const EdgeListOptions& opts = {});

void write_edge_list(const WeightedGraph& g, std::ostream& out);
void save_edge_list(const WeightedGraph& g, const std::filesystem::path& path);

// {"graph": "<edge list path>", "source": s, "target": t, "p_star": [...]}
struct InstanceFile {
  std::string graph;
  NodeId source = kNoNode;
  NodeId target = kNoNode;
  std::vector<NodeId> p_star;
};

InstanceFile load_instance_file(const std::filesystem::path& path);
void save_instance_file(const InstanceFile& inst,
                        const std::filesystem::path& path);

// Loads the graph referenced by an instance file (relative paths resolve
// against the instance file's directory) and builds the validated query.
struct LoadedInstance {
  WeightedGraph graph;
  PathQuery query;
};
LoadedInstance load_instance(const std::filesystem::path& path);

}  // namespace pathcut
