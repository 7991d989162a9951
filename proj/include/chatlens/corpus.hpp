#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chatlens/time.hpp"

namespace chatlens {

enum class Country { CO, VE, EC, PE, CL, BR, MX, US, Other, Unknown };

/// Country class resolved from a telephone prefix. `prefix` is only set for
/// Country::Other and holds the matched table prefix.
struct CountryCode {
  Country tag = Country::Unknown;
  std::string prefix;

  friend auto operator<=>(const CountryCode&, const CountryCode&) = default;

  /// "CO", "VE", ..., "OTHER(34)", "UNKNOWN".
  std::string to_string() const;
};

struct PhoneNumber {
  std::string e164;  // digits only, country prefix included
  CountryCode country;
  std::string national;

  friend auto operator<=>(const PhoneNumber& a, const PhoneNumber& b) { return a.e164 <=> b.e164; }
  friend bool operator==(const PhoneNumber& a, const PhoneNumber& b) { return a.e164 == b.e164; }
};

/// Prefix-free map from dialing prefixes to country classes.
class CountryTable {
 public:
  /// Parses `<prefix>,<tag>` lines; `#` starts a comment. Throws DataError on
  /// malformed lines or if any prefix is a proper prefix of another.
  static CountryTable parse(std::string_view text);
  static CountryTable load(const std::string& path);
  /// The table shipped in data/country_prefixes.csv.
  static const CountryTable& builtin();

  /// Longest matching prefix, or Unknown with the whole string as national part.
  PhoneNumber resolve(std::string_view digits) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, CountryCode, std::less<>> entries_;
  std::size_t max_prefix_len_ = 0;
};

/// Accepts `+` followed by 7-15 digits, or a bare digit string.
PhoneNumber parse_phone(std::string_view raw, const CountryTable& table = CountryTable::builtin());

/// Extracts `<digits|X>-<digits|X>` from the `u=` parameter of a profile
/// picture link, where it precedes an encoded `@g.us`.
std::optional<std::string> parse_uid_from_icon_url(std::string_view url);

/// Icon uid if present, otherwise lowercase hex SHA-256 of the title bytes.
std::string derive_uid(const std::optional<std::string>& icon_uid, std::string_view title);

std::string sha256_hex(std::string_view bytes);

enum class MessageKind { Text, Image, Video, Audio, Other };

std::string_view to_string(MessageKind kind);
std::optional<MessageKind> parse_message_kind(std::string_view s);

struct Provenance {
  std::string server;
  Timestamp read_time;

  friend auto operator<=>(const Provenance& a, const Provenance& b) {
    if (auto c = a.read_time <=> b.read_time; c != 0) return c;
    return a.server <=> b.server;
  }
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Message {
  std::string id;
  std::string group_uid;
  PhoneNumber sender;
  Timestamp sent_time;
  MessageKind kind = MessageKind::Text;
  std::optional<std::string> text;
  std::optional<std::string> media_hash;
  std::optional<std::int64_t> media_duration_s;
  bool has_emoji = false;
  bool forwarded = false;
  std::optional<std::string> reply_to;
  Provenance provenance;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Content identity for duplicate detection: the text for text messages and the
/// media hash for media. Empty when the message can never match another.
std::optional<std::string> content_identity(const Message& m);

struct Group {
  std::string uid;
  std::optional<std::string> title;
  std::optional<std::string> icon_uid;
  std::vector<std::string> merged_from;

  friend bool operator==(const Group&, const Group&) = default;
};

/// Deduplicated messages plus group metadata. Membership and lookups are
/// derived on construction and never stored independently.
class Corpus {
 public:
  Corpus() = default;
  /// Throws DataError if a message references a group that is not listed or a
  /// group violates its invariants.
  Corpus(std::map<std::string, Group> groups, std::vector<Message> messages);

  const std::map<std::string, Group>& groups() const { return groups_; }
  const std::vector<Message>& messages() const { return messages_; }

  bool has_group(std::string_view uid) const { return groups_.find(std::string(uid)) != groups_.end(); }
  const Group& group(std::string_view uid) const;

  /// Indices into messages() for one group, in corpus order.
  std::span<const std::size_t> group_message_indices(std::string_view uid) const;
  /// Distinct sender e164 strings of a group.
  const std::set<std::string>& group_members(std::string_view uid) const;
  /// All distinct senders keyed by e164.
  const std::map<std::string, PhoneNumber>& users() const { return users_; }

  /// First message with this id, or nullptr.
  const Message* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.groups_ == b.groups_ && a.messages_ == b.messages_;
  }

 private:
  std::map<std::string, Group> groups_;
  std::vector<Message> messages_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_group_;
  std::map<std::string, std::set<std::string>, std::less<>> members_;
  std::map<std::string, PhoneNumber> users_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace chatlens
