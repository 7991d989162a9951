#include "chatlens/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <set>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"

namespace chatlens::graph {

SimpleGraph::SimpleGraph(std::vector<std::string> node_ids) {
  for (auto& id : node_ids) add_node(std::move(id));
}

std::size_t SimpleGraph::add_node(std::string id) {
  auto [it, inserted] = index_.emplace(id, ids_.size());
  if (!inserted) return it->second;
  ids_.push_back(std::move(id));
  adjacency_.emplace_back();
  return ids_.size() - 1;
}

bool SimpleGraph::add_edge(std::size_t a, std::size_t b) {
  if (a == b) return false;
  auto& na = adjacency_[a];
  auto pos = std::lower_bound(na.begin(), na.end(), b);
  if (pos != na.end() && *pos == b) return false;
  na.insert(pos, b);
  auto& nb = adjacency_[b];
  nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
  ++edge_count_;
  return true;
}

std::optional<std::size_t> SimpleGraph::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool SimpleGraph::has_edge(std::size_t a, std::size_t b) const {
  return std::binary_search(adjacency_[a].begin(), adjacency_[a].end(), b);
}

std::vector<std::pair<std::size_t, std::size_t>> SimpleGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count_);
  for (std::size_t a = 0; a < adjacency_.size(); ++a) {
    for (std::size_t b : adjacency_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

SimpleGraph build_group_graph(const Corpus& corpus) {
  SimpleGraph g;
  std::map<std::string, std::vector<std::size_t>> groups_of_user;
  for (const auto& [uid, group] : corpus.groups()) {
    std::size_t node = g.add_node(uid);
    for (const auto& u : corpus.group_members(uid)) groups_of_user[u].push_back(node);
  }
  for (const auto& [user, nodes] : groups_of_user) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) g.add_edge(nodes[i], nodes[j]);
    }
  }
  return g;
}

SimpleGraph build_user_graph(const Corpus& corpus) {
  SimpleGraph g;
  for (const auto& [e164, phone] : corpus.users()) g.add_node(e164);
  for (const auto& [uid, group] : corpus.groups()) {
    std::vector<std::size_t> nodes;
    for (const auto& u : corpus.group_members(uid)) nodes.push_back(*g.find(u));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) g.add_edge(nodes[i], nodes[j]);
    }
  }
  return g;
}

std::vector<std::vector<std::size_t>> connected_components(const SimpleGraph& g) {
  std::vector<std::vector<std::size_t>> comps;
  std::vector<bool> seen(g.node_count(), false);
  for (std::size_t s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (std::size_t v : g.neighbours(u)) {
        if (!seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

std::vector<std::int64_t> bfs_distances(const SimpleGraph& g, std::size_t source) {
  std::vector<std::int64_t> dist(g.node_count(), kUnreachable);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : g.neighbours(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

double avg_shortest_path(const SimpleGraph& g, std::size_t node) {
  auto dist = bfs_distances(g, node);
  std::int64_t sum = 0;
  std::size_t reached = 0;
  for (std::size_t v = 0; v < dist.size(); ++v) {
    if (v != node && dist[v] != kUnreachable) {
      sum += dist[v];
      ++reached;
    }
  }
  if (reached == 0) {
    throw UndefinedError("average path length undefined for singleton component of " + g.id(node));
  }
  return static_cast<double>(sum) / static_cast<double>(reached);
}

std::int64_t eccentricity(const SimpleGraph& g, std::size_t node) {
  auto dist = bfs_distances(g, node);
  return *std::max_element(dist.begin(), dist.end());
}

std::int64_t diameter(const SimpleGraph& g) {
  std::int64_t d = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) d = std::max(d, eccentricity(g, v));
  return d;
}

double clustering_coefficient(const SimpleGraph& g, std::size_t node) {
  const auto& ns = g.neighbours(node);
  const std::size_t d = ns.size();
  if (d < 2) throw UndefinedError("clustering coefficient undefined for degree < 2 at " + g.id(node));
  std::size_t links = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (g.has_edge(ns[i], ns[j])) ++links;
    }
  }
  return static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
}

std::string_view to_string(PercentileClass c) {
  switch (c) {
    case PercentileClass::Low: return "LOW";
    case PercentileClass::Mid: return "MID";
    case PercentileClass::High: return "HIGH";
  }
  return "LOW";
}

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) throw UndefinedError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<PercentileClass> percentile_classes(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double p30 = nearest_rank_percentile(values, 30);
  const double p70 = nearest_rank_percentile(values, 70);
  std::vector<PercentileClass> out;
  out.reserve(values.size());
  for (double v : values) {
    if (v <= p30) {
      out.push_back(PercentileClass::Low);
    } else if (v > p70) {
      out.push_back(PercentileClass::High);
    } else {
      out.push_back(PercentileClass::Mid);
    }
  }
  return out;
}

std::vector<NodeMetrics> node_metrics(const SimpleGraph& g) {
  auto comps = connected_components(g);
  std::vector<std::size_t> comp_of(g.node_count());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t v : comps[c]) comp_of[v] = c;
  }
  std::vector<NodeMetrics> out;
  out.reserve(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    NodeMetrics m;
    m.node = g.id(v);
    m.degree = g.degree(v);
    m.component_id = comp_of[v];
    if (comps[comp_of[v]].size() >= 2) m.avg_path = avg_shortest_path(g, v);
    if (m.degree >= 2) m.clustering = clustering_coefficient(g, v);
    out.push_back(std::move(m));
  }
  return out;
}

void write_edge_list_csv(std::ostream& out, const SimpleGraph& g) {
  csv::Writer w(out);
  w.header({"node_a", "node_b"});
  for (const auto& [a, b] : g.edges()) {
    w << g.id(a) << g.id(b);
    w.end_row();
  }
}

void write_node_metrics_csv(std::ostream& out, const std::vector<NodeMetrics>& rows) {
  csv::Writer w(out);
  w.header({"node", "degree", "component_id", "avg_path", "clustering"});
  for (const auto& r : rows) {
    w << r.node << r.degree << r.component_id << r.avg_path << r.clustering;
    w.end_row();
  }
}

}  // namespace chatlens::graph
