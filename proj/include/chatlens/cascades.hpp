#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chatlens/corpus.hpp"

namespace chatlens::cascades {

inline constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

/// Reply tree. Node 0 is the root; parent[i] indexes into the same arrays.
struct CascadeGraph {
  std::vector<std::string> ids;
  std::vector<std::size_t> parent;
  std::vector<Timestamp> sent;
  std::string group_uid;

  std::size_t size() const { return parent.size(); }
  const std::string& root() const { return ids.front(); }

  /// Unlabelled tree from a parent array (exactly one kNoParent, which must be node 0).
  static CascadeGraph from_parents(std::vector<std::size_t> parent);
};

struct Forest {
  std::vector<CascadeGraph> cascades;  // ordered by root position in the corpus
  std::size_t unresolved = 0;
  /// Replies that reached a root; each appears in exactly one cascade.
  std::size_t resolved = 0;
};

/// Follows every reply to its root. Replies whose chain hits a missing id or a
/// cycle are unresolved and stay out of all cascades. Roots without any
/// resolved reply are not cascades.
Forest resolve_replies(const Corpus& corpus);

/// All-pairs distance sum over n^2 ordered pairs (self-pairs included); 0 for n = 1.
double virality_ours(const CascadeGraph& g);
/// Mean distance over distinct ordered pairs. Throws UndefinedError for n = 1.
double virality_goel(const CascadeGraph& g);
/// Sum of d(i,j) over ordered pairs, via edge cut sizes.
std::int64_t distance_sum(const CascadeGraph& g);
std::int64_t diameter(const CascadeGraph& g);
/// Last reply minus root, in minutes; 0 for a lone root.
double duration_minutes(const CascadeGraph& g);
/// Direct replies per node.
std::vector<std::size_t> direct_replies(const CascadeGraph& g);

struct CascadeStats {
  std::string root_id;
  std::string group_uid;
  std::size_t size = 0;
  double virality_ours = 0;
  std::optional<double> virality_goel;
  std::int64_t diameter = 0;
  double duration_minutes = 0;
};

CascadeStats cascade_stats(const CascadeGraph& g);

/// Other messages of the same group sent within +-window minutes, inclusive.
std::size_t competing_count(const Corpus& corpus, std::size_t message_index, std::int64_t window_minutes = 5);
/// competing_count for every message.
std::vector<std::size_t> competing_counts(const Corpus& corpus, std::int64_t window_minutes = 5);

/// Mean cascade virality over messages of the group that sit in a cascade; 0 without cascades.
double group_virality(const Corpus& corpus, const Forest& forest, std::string_view group_uid);
std::map<std::string, double> group_viralities(const Corpus& corpus, const Forest& forest);

struct MessageVirality {
  std::string id;
  std::string cascade_root;
  double virality_ours = 0;
  std::size_t replies = 0;
};

std::vector<MessageVirality> message_viralities(const Forest& forest);

void write_cascades_csv(std::ostream& out, const std::vector<CascadeStats>& rows);
void write_message_virality_csv(std::ostream& out, const std::vector<MessageVirality>& rows);

}  // namespace chatlens::cascades
