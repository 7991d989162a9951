#include "chatlens/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "chatlens/error.hpp"

namespace chatlens {

namespace bundled {
extern const std::string_view kCountryPrefixes;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<Country> tag_from_string(std::string_view s) {
  static constexpr std::pair<std::string_view, Country> kTags[] = {
      {"CO", Country::CO}, {"VE", Country::VE}, {"VZ", Country::VE}, {"EC", Country::EC},
      {"PE", Country::PE}, {"CL", Country::CL}, {"BR", Country::BR}, {"MX", Country::MX},
      {"US", Country::US}, {"OTHER", Country::Other}};
  for (const auto& [name, tag] : kTags) {
    if (s == name) return tag;
  }
  return std::nullopt;
}

}  // namespace

std::string CountryCode::to_string() const {
  switch (tag) {
    case Country::CO: return "CO";
    case Country::VE: return "VE";
    case Country::EC: return "EC";
    case Country::PE: return "PE";
    case Country::CL: return "CL";
    case Country::BR: return "BR";
    case Country::MX: return "MX";
    case Country::US: return "US";
    case Country::Other: return "OTHER(" + prefix + ")";
    case Country::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

CountryTable CountryTable::parse(std::string_view text) {
  CountryTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw DataError("country table line " + std::to_string(line_no) + ": expected <prefix>,<tag>");
    }
    auto prefix = trim(line.substr(0, comma));
    auto tag_text = trim(line.substr(comma + 1));
    if (!all_digits(prefix)) {
      throw DataError("country table line " + std::to_string(line_no) + ": prefix must be digits");
    }
    auto tag = tag_from_string(tag_text);
    if (!tag) {
      throw DataError("country table line " + std::to_string(line_no) + ": unknown tag '" +
                      std::string(tag_text) + "'");
    }
    CountryCode code{*tag, *tag == Country::Other ? std::string(prefix) : std::string{}};
    if (!table.entries_.emplace(std::string(prefix), code).second) {
      throw DataError("country table line " + std::to_string(line_no) + ": duplicate prefix " +
                      std::string(prefix));
    }
    table.max_prefix_len_ = std::max(table.max_prefix_len_, prefix.size());
  }
  // Sorted order puts every proper prefix immediately before some extension of it.
  for (auto it = table.entries_.begin(); it != table.entries_.end(); ++it) {
    auto next = std::next(it);
    if (next != table.entries_.end() && next->first.starts_with(it->first)) {
      throw DataError("country table is not prefix-free: " + it->first + " is a prefix of " +
                      next->first);
    }
  }
  return table;
}

CountryTable CountryTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open country table " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const CountryTable& CountryTable::builtin() {
  static const CountryTable table = parse(bundled::kCountryPrefixes);
  return table;
}

PhoneNumber CountryTable::resolve(std::string_view digits) const {
  for (std::size_t len = std::min(max_prefix_len_, digits.size()); len > 0; --len) {
    auto it = entries_.find(digits.substr(0, len));
    if (it != entries_.end()) {
      return {std::string(digits), it->second, std::string(digits.substr(len))};
    }
  }
  return {std::string(digits), CountryCode{Country::Unknown, {}}, std::string(digits)};
}

PhoneNumber parse_phone(std::string_view raw, const CountryTable& table) {
  std::string_view digits = raw;
  bool plus = !digits.empty() && digits.front() == '+';
  if (plus) digits.remove_prefix(1);
  if (!all_digits(digits)) {
    throw DataError("malformed phone number '" + std::string(raw) + "'");
  }
  if (plus && (digits.size() < 7 || digits.size() > 15)) {
    throw DataError("malformed phone number '" + std::string(raw) + "': expected 7-15 digits");
  }
  return table.resolve(digits);
}

std::optional<std::string> parse_uid_from_icon_url(std::string_view url) {
  static const std::regex kPattern(R"([?&]u=([0-9X]+-[0-9X]+)(?:%40|@)g\.us)", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(url.begin(), url.end(), m, kPattern)) return m[1].str();
  return std::nullopt;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string derive_uid(const std::optional<std::string>& icon_uid, std::string_view title) {
  if (icon_uid && !icon_uid->empty()) return *icon_uid;
  if (title.empty()) throw DataError("cannot identify group: no icon uid and empty title");
  return sha256_hex(title);
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Text: return "text";
    case MessageKind::Image: return "image";
    case MessageKind::Video: return "video";
    case MessageKind::Audio: return "audio";
    case MessageKind::Other: return "other";
  }
  return "other";
}

std::optional<MessageKind> parse_message_kind(std::string_view s) {
  if (s == "text") return MessageKind::Text;
  if (s == "image") return MessageKind::Image;
  if (s == "video") return MessageKind::Video;
  if (s == "audio") return MessageKind::Audio;
  if (s == "other") return MessageKind::Other;
  return std::nullopt;
}

std::optional<std::string> content_identity(const Message& m) {
  if (m.kind == MessageKind::Text) return m.text;
  return m.media_hash;
}

Corpus::Corpus(std::map<std::string, Group> groups, std::vector<Message> messages)
    : groups_(std::move(groups)), messages_(std::move(messages)) {
  for (const auto& [uid, g] : groups_) {
    if (uid.empty() || g.uid != uid) throw DataError("group entry with empty or mismatched uid");
    std::set<std::string> seen;
    for (const auto& former : g.merged_from) {
      if (former == uid || !seen.insert(former).second) {
        throw DataError("group " + uid + ": invalid merged_from list");
      }
    }
    by_group_[uid];
    members_[uid];
  }
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    const Message& m = messages_[i];
    auto it = by_group_.find(m.group_uid);
    if (it == by_group_.end()) {
      throw DataError("message " + m.id + " references unknown group " + m.group_uid);
    }
    it->second.push_back(i);
    members_.find(m.group_uid)->second.insert(m.sender.e164);
    users_.emplace(m.sender.e164, m.sender);
    by_id_.emplace(m.id, i);
  }
}

const Group& Corpus::group(std::string_view uid) const {
  auto it = groups_.find(std::string(uid));
  if (it == groups_.end()) throw DataError("unknown group " + std::string(uid));
  return it->second;
}

std::span<const std::size_t> Corpus::group_message_indices(std::string_view uid) const {
  auto it = by_group_.find(uid);
  if (it == by_group_.end()) throw DataError("unknown group " + std::string(uid));
  return it->second;
}

const std::set<std::string>& Corpus::group_members(std::string_view uid) const {
  auto it = members_.find(uid);
  if (it == members_.end()) throw DataError("unknown group " + std::string(uid));
  return it->second;
}

const Message* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &messages_[it->second];
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

}  // namespace chatlens
