#pragma once

#include <string>
#include <vector>

#include "chatlens/corpus.hpp"

namespace chatlens::testing {

inline Timestamp at(const char* iso) { return *parse_iso8601(iso); }

/// Text message with a Colombian or Venezuelan sender, depending on the digits.
inline Message text_message(std::string id, std::string group, std::string sender, const char* sent,
                            std::string text) {
  Message m;
  m.id = std::move(id);
  m.group_uid = std::move(group);
  m.sender = parse_phone(sender);
  m.sent_time = at(sent);
  m.kind = MessageKind::Text;
  m.text = std::move(text);
  return m;
}

/// Corpus over the groups named by the messages, titled by their uid.
inline Corpus corpus_of(std::vector<Message> messages) {
  std::map<std::string, Group> groups;
  for (const auto& m : messages) {
    auto& g = groups[m.group_uid];
    g.uid = m.group_uid;
    g.title = m.group_uid;
  }
  return Corpus(std::move(groups), std::move(messages));
}

}  // namespace chatlens::testing
