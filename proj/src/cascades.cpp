#include "chatlens/cascades.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"

namespace chatlens::cascades {

namespace {

std::vector<std::vector<std::size_t>> children_of(const CascadeGraph& g) {
  std::vector<std::vector<std::size_t>> ch(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.parent[i] != kNoParent) ch[g.parent[i]].push_back(i);
  }
  return ch;
}

// BFS order from the root; parents always precede children.
std::vector<std::size_t> bfs_order(const CascadeGraph& g, const std::vector<std::vector<std::size_t>>& ch) {
  std::vector<std::size_t> order{0};
  order.reserve(g.size());
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (std::size_t c : ch[order[head]]) order.push_back(c);
  }
  return order;
}

std::vector<std::int64_t> tree_distances(const CascadeGraph& g, const std::vector<std::vector<std::size_t>>& ch,
                                         std::size_t source) {
  std::vector<std::int64_t> dist(g.size(), -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  auto visit = [&](std::size_t from, std::size_t to) {
    if (dist[to] < 0) {
      dist[to] = dist[from] + 1;
      queue.push_back(to);
    }
  };
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    if (g.parent[u] != kNoParent) visit(u, g.parent[u]);
    for (std::size_t c : ch[u]) visit(u, c);
  }
  return dist;
}

}  // namespace

CascadeGraph CascadeGraph::from_parents(std::vector<std::size_t> parent) {
  if (parent.empty() || parent[0] != kNoParent) throw ArgumentError("node 0 must be the root");
  CascadeGraph g;
  g.parent = std::move(parent);
  g.ids.resize(g.parent.size());
  g.sent.assign(g.parent.size(), Timestamp{});
  for (std::size_t i = 0; i < g.parent.size(); ++i) {
    g.ids[i] = std::to_string(i);
    if (i > 0 && (g.parent[i] == kNoParent || g.parent[i] >= g.parent.size())) {
      throw ArgumentError("node " + std::to_string(i) + " has no valid parent");
    }
  }
  if (bfs_order(g, children_of(g)).size() != g.size()) throw ArgumentError("parent array is not a tree");
  return g;
}

Forest resolve_replies(const Corpus& corpus) {
  const auto& msgs = corpus.messages();
  const std::size_t n = msgs.size();
  constexpr std::size_t kUnknown = static_cast<std::size_t>(-2);
  constexpr std::size_t kBroken = static_cast<std::size_t>(-3);
  // root index per message, kBroken when the chain cannot be followed
  std::vector<std::size_t> root(n, kUnknown);
  std::vector<std::size_t> parent(n, kNoParent);
  for (std::size_t i = 0; i < n; ++i) {
    if (!msgs[i].reply_to) continue;
    auto p = corpus.index_of(*msgs[i].reply_to);
    parent[i] = p ? *p : kBroken;
  }

  std::vector<std::size_t> path;
  std::vector<bool> on_path(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (root[i] != kUnknown) continue;
    path.clear();
    std::size_t cur = i;
    std::size_t result = kUnknown;
    while (true) {
      if (root[cur] != kUnknown) {
        result = root[cur];
        break;
      }
      if (on_path[cur]) {
        result = kBroken;
        break;
      }
      on_path[cur] = true;
      path.push_back(cur);
      if (parent[cur] == kNoParent) {
        result = cur;
        break;
      }
      if (parent[cur] == kBroken) {
        result = kBroken;
        break;
      }
      cur = parent[cur];
    }
    for (std::size_t v : path) {
      root[v] = result;
      on_path[v] = false;
    }
  }

  Forest forest;
  std::map<std::size_t, std::vector<std::size_t>> members;  // root -> replies in corpus order
  for (std::size_t i = 0; i < n; ++i) {
    if (parent[i] == kNoParent) continue;
    if (root[i] == kBroken) {
      ++forest.unresolved;
    } else {
      ++forest.resolved;
      members[root[i]].push_back(i);
    }
  }
  for (const auto& [r, replies] : members) {
    CascadeGraph g;
    g.group_uid = msgs[r].group_uid;
    std::map<std::size_t, std::size_t> local{{r, 0}};
    g.ids.push_back(msgs[r].id);
    g.sent.push_back(msgs[r].sent_time);
    g.parent.push_back(kNoParent);
    for (std::size_t i : replies) {
      local.emplace(i, g.ids.size());
      g.ids.push_back(msgs[i].id);
      g.sent.push_back(msgs[i].sent_time);
      g.parent.push_back(kNoParent);
    }
    for (std::size_t i : replies) g.parent[local.at(i)] = local.at(parent[i]);
    forest.cascades.push_back(std::move(g));
  }
  return forest;
}

std::int64_t distance_sum(const CascadeGraph& g) {
  const auto ch = children_of(g);
  const auto order = bfs_order(g, ch);
  std::vector<std::int64_t> subtree(g.size(), 1);
  const auto n = static_cast<std::int64_t>(g.size());
  std::int64_t sum = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::size_t v = *it;
    if (g.parent[v] == kNoParent) continue;
    subtree[g.parent[v]] += subtree[v];
    sum += subtree[v] * (n - subtree[v]);
  }
  return 2 * sum;
}

double virality_ours(const CascadeGraph& g) {
  const double n = static_cast<double>(g.size());
  return static_cast<double>(distance_sum(g)) / (n * n);
}

double virality_goel(const CascadeGraph& g) {
  if (g.size() < 2) throw UndefinedError("structural virality undefined for a single message " + g.root());
  const double n = static_cast<double>(g.size());
  return static_cast<double>(distance_sum(g)) / (n * (n - 1));
}

std::int64_t diameter(const CascadeGraph& g) {
  const auto ch = children_of(g);
  auto first = tree_distances(g, ch, 0);
  auto far = static_cast<std::size_t>(std::max_element(first.begin(), first.end()) - first.begin());
  auto second = tree_distances(g, ch, far);
  return *std::max_element(second.begin(), second.end());
}

double duration_minutes(const CascadeGraph& g) {
  if (g.size() < 2) return 0.0;
  Timestamp last = *std::max_element(g.sent.begin(), g.sent.end());
  return static_cast<double>(last.seconds - g.sent.front().seconds) / 60.0;
}

std::vector<std::size_t> direct_replies(const CascadeGraph& g) {
  std::vector<std::size_t> out(g.size(), 0);
  for (std::size_t p : g.parent) {
    if (p != kNoParent) ++out[p];
  }
  return out;
}

CascadeStats cascade_stats(const CascadeGraph& g) {
  CascadeStats s;
  s.root_id = g.root();
  s.group_uid = g.group_uid;
  s.size = g.size();
  s.virality_ours = virality_ours(g);
  if (g.size() >= 2) s.virality_goel = virality_goel(g);
  s.diameter = diameter(g);
  s.duration_minutes = duration_minutes(g);
  return s;
}

std::vector<std::size_t> competing_counts(const Corpus& corpus, std::int64_t window_minutes) {
  const auto& msgs = corpus.messages();
  std::vector<std::size_t> out(msgs.size(), 0);
  for (const auto& [uid, g] : corpus.groups()) {
    auto idx = corpus.group_message_indices(uid);
    std::vector<std::int64_t> minutes;
    minutes.reserve(idx.size());
    for (std::size_t i : idx) minutes.push_back(msgs[i].sent_time.minutes());
    std::sort(minutes.begin(), minutes.end());
    for (std::size_t i : idx) {
      std::int64_t t = msgs[i].sent_time.minutes();
      auto lo = std::lower_bound(minutes.begin(), minutes.end(), t - window_minutes);
      auto hi = std::upper_bound(minutes.begin(), minutes.end(), t + window_minutes);
      out[i] = static_cast<std::size_t>(hi - lo) - 1;
    }
  }
  return out;
}

std::size_t competing_count(const Corpus& corpus, std::size_t message_index, std::int64_t window_minutes) {
  const auto& m = corpus.messages().at(message_index);
  const std::int64_t t = m.sent_time.minutes();
  std::size_t count = 0;
  for (std::size_t i : corpus.group_message_indices(m.group_uid)) {
    if (i == message_index) continue;
    std::int64_t u = corpus.messages()[i].sent_time.minutes();
    if (u >= t - window_minutes && u <= t + window_minutes) ++count;
  }
  return count;
}

std::map<std::string, double> group_viralities(const Corpus& corpus, const Forest& forest) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& g : forest.cascades) {
    const double v = virality_ours(g);
    for (const auto& id : g.ids) {
      const Message* m = corpus.find(id);
      auto& [sum, n] = acc[m ? m->group_uid : g.group_uid];
      sum += v;
      ++n;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [uid, group] : corpus.groups()) {
    auto it = acc.find(uid);
    out[uid] = it == acc.end() ? 0.0 : it->second.first / static_cast<double>(it->second.second);
  }
  return out;
}

double group_virality(const Corpus& corpus, const Forest& forest, std::string_view group_uid) {
  auto all = group_viralities(corpus, forest);
  auto it = all.find(std::string(group_uid));
  return it == all.end() ? 0.0 : it->second;
}

std::vector<MessageVirality> message_viralities(const Forest& forest) {
  std::vector<MessageVirality> out;
  for (const auto& g : forest.cascades) {
    const double v = virality_ours(g);
    const auto replies = direct_replies(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.push_back({g.ids[i], g.root(), v, replies[i]});
  }
  return out;
}

void write_cascades_csv(std::ostream& out, const std::vector<CascadeStats>& rows) {
  csv::Writer w(out);
  w.header({"root_id", "group_uid", "size", "virality_ours", "virality_goel", "diameter", "duration_min"});
  for (const auto& r : rows) {
    w << r.root_id << r.group_uid << r.size << r.virality_ours << r.virality_goel << r.diameter
      << r.duration_minutes;
    w.end_row();
  }
}

void write_message_virality_csv(std::ostream& out, const std::vector<MessageVirality>& rows) {
  csv::Writer w(out);
  w.header({"id", "cascade_root", "virality_ours", "replies"});
  for (const auto& r : rows) {
    w << r.id << r.cascade_root << r.virality_ours << r.replies;
    w.end_row();
  }
}

}  // namespace chatlens::cascades
