#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chatlens/corpus.hpp"

namespace chatlens::graph {

/// Undirected graph without self-loops or parallel edges. Nodes are dense
/// indices with an attached string id.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  explicit SimpleGraph(std::vector<std::string> node_ids);

  std::size_t add_node(std::string id);
  /// Ignores self-loops and existing edges. Returns true if an edge was added.
  bool add_edge(std::size_t a, std::size_t b);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::string& id(std::size_t node) const { return ids_[node]; }
  std::optional<std::size_t> find(std::string_view id) const;
  /// Sorted neighbour indices.
  const std::vector<std::size_t>& neighbours(std::size_t node) const { return adjacency_[node]; }
  std::size_t degree(std::size_t node) const { return adjacency_[node].size(); }
  bool has_edge(std::size_t a, std::size_t b) const;
  /// Each edge once, as (smaller, larger) index pairs in sorted order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t edge_count_ = 0;
};

/// Groups as nodes, joined when they share at least one member.
SimpleGraph build_group_graph(const Corpus& corpus);
/// Users as nodes, joined when they co-occur in at least one group.
SimpleGraph build_user_graph(const Corpus& corpus);

/// Components sorted by descending size (ties by smallest node index); each
/// component lists its nodes in ascending order.
std::vector<std::vector<std::size_t>> connected_components(const SimpleGraph& g);

inline constexpr std::int64_t kUnreachable = -1;

/// BFS hop counts from `source`; kUnreachable for other components.
std::vector<std::int64_t> bfs_distances(const SimpleGraph& g, std::size_t source);

/// Mean BFS distance to the other nodes of the component. Throws
/// UndefinedError when the component is a singleton.
double avg_shortest_path(const SimpleGraph& g, std::size_t node);

/// Largest finite distance from `node`.
std::int64_t eccentricity(const SimpleGraph& g, std::size_t node);
/// Largest finite distance between any two nodes; 0 for graphs without edges.
std::int64_t diameter(const SimpleGraph& g);

/// Triangles through node over d(d-1)/2. Throws UndefinedError when degree < 2.
double clustering_coefficient(const SimpleGraph& g, std::size_t node);

enum class PercentileClass { Low, Mid, High };
std::string_view to_string(PercentileClass c);

/// Nearest-rank cutoffs at the 30th and 70th percentiles: Low when value <= P30,
/// High when value > P70, Mid otherwise.
std::vector<PercentileClass> percentile_classes(const std::vector<double>& values);
/// Nearest-rank percentile (1-based rank ceil(p/100 * n)) of a non-empty sample.
double nearest_rank_percentile(std::vector<double> values, double p);

struct NodeMetrics {
  std::string node;
  std::size_t degree = 0;
  std::size_t component_id = 0;
  std::optional<double> avg_path;
  std::optional<double> clustering;
};

std::vector<NodeMetrics> node_metrics(const SimpleGraph& g);

void write_edge_list_csv(std::ostream& out, const SimpleGraph& g);
void write_node_metrics_csv(std::ostream& out, const std::vector<NodeMetrics>& rows);

}  // namespace chatlens::graph
