#pragma once

// Brute-force reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "chatlens/graph.hpp"
#include "chatlens/ingest.hpp"

namespace chatlens::oracle {

/// Erdos-Renyi style graph with the given edge probability.
inline graph::SimpleGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
  graph::SimpleGraph g(ids);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (u(rng) < p) g.add_edge(a, b);
    }
  }
  return g;
}

inline constexpr std::int64_t kInf = 1 << 30;

/// All-pairs hop distances by Floyd-Warshall on an adjacency matrix.
inline std::vector<std::vector<std::int64_t>> floyd_warshall(const graph::SimpleGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j : g.neighbours(i)) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
  }
  return d;
}

/// Triangles through `v` by enumerating every neighbour pair.
inline std::size_t triangles_at(const graph::SimpleGraph& g, std::size_t v) {
  std::size_t t = 0;
  const auto& nb = g.neighbours(v);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    for (std::size_t j = i + 1; j < nb.size(); ++j) t += g.has_edge(nb[i], nb[j]);
  }
  return t;
}

/// Quadratic dedup: for every record, count same-key records in its reading,
/// then keep the largest such count per key.
inline std::map<ingest::DuplicateKey, std::size_t> dedup_key_counts(const std::vector<Message>& records) {
  std::map<ingest::DuplicateKey, std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto ki = ingest::duplicate_key(records[i]);
    if (!ki) continue;
    std::size_t same = 0;
    for (std::size_t j = 0; j < records.size(); ++j) {
      if (records[j].provenance == records[i].provenance && ingest::duplicate_key(records[j]) == ki) ++same;
    }
    auto& b = best[*ki];
    b = std::max(b, same);
  }
  return best;
}

inline std::map<ingest::DuplicateKey, std::size_t> key_counts(const std::vector<Message>& messages) {
  std::map<ingest::DuplicateKey, std::size_t> out;
  for (const auto& m : messages) {
    if (auto k = ingest::duplicate_key(m)) ++out[*k];
  }
  return out;
}

/// Mean pairwise tree distance by BFS from every node, over n^2 ordered pairs.
inline double tree_mean_distance(const std::vector<std::size_t>& parent, bool distinct_pairs) {
  const std::size_t n = parent.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 1; i < n; ++i) {
    adj[i].push_back(parent[i]);
    adj[parent[i]].push_back(i);
  }
  double sum = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::int64_t> dist(n, -1);
    std::vector<std::size_t> queue{s};
    dist[s] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      for (std::size_t w : adj[queue[q]]) {
        if (dist[w] < 0) {
          dist[w] = dist[queue[q]] + 1;
          queue.push_back(w);
        }
      }
    }
    for (auto d : dist) sum += static_cast<double>(d);
  }
  const double pairs = distinct_pairs ? double(n) * double(n - 1) : double(n) * double(n);
  return sum / pairs;
}

/// Gini as twice the area between the diagonal and the trapezoidal Lorenz curve.
inline double gini_from_lorenz(std::vector<double> counts) {
  std::sort(counts.begin(), counts.end());
  double total = 0;
  for (double c : counts) total += c;
  const double n = static_cast<double>(counts.size());
  double area = 0, cum = 0;
  for (double c : counts) {
    const double next = cum + c / total;
    area += (cum + next) / 2.0 / n;
    cum = next;
  }
  return 2.0 * (0.5 - area);
}

}  // namespace chatlens::oracle
