#include "chatlens/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "chatlens/error.hpp"
#include "chatlens/stemmer.hpp"

namespace chatlens {
namespace bundled {
extern const std::string_view kStopwordsEs;
}

namespace text {

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp;
    std::size_t len;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::size_t utf8_length(std::string_view s) { return utf8_decode(s).size(); }

char32_t to_lower(char32_t c) {
  if (c < 0x80) return (c >= U'A' && c <= U'Z') ? c + 0x20 : c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c >= 0x100 && c <= 0x137 && c != 0x130) return c | 1;
  if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  if (c >= 0x1E00 && c <= 0x1E95) return c | 1;
  if (c >= 0xFF21 && c <= 0xFF3A) return c + 0x20;
  return c;
}

bool is_space(char32_t c) {
  return c == U' ' || (c >= 0x09 && c <= 0x0D) || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_emoji(char32_t c) {
  return (c >= 0x1F000 && c <= 0x1FAFF) || (c >= 0x2600 && c <= 0x27BF) ||
         (c >= 0x2B00 && c <= 0x2BFF) || (c >= 0x2190 && c <= 0x21FF) ||
         (c >= 0x2300 && c <= 0x23FF) || c == 0x200D || (c >= 0xFE00 && c <= 0xFE0F) ||
         c == 0x00A9 || c == 0x00AE || c == 0x203C || c == 0x2049 || c == 0x2122 || c == 0x2139;
}

bool contains_emoji(std::string_view s) {
  for (char32_t c : utf8_decode(s)) {
    if (is_emoji(c) && c != 0x200D && !(c >= 0xFE00 && c <= 0xFE0F)) return true;
  }
  return false;
}

bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') ||
           c == U'_';
  }
  if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA || c == 0xB2 || c == 0xB3 || c == 0xB9;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c <= 0x2FF) return true;                      // Latin-1 letters, Latin Extended, IPA, modifiers
  if (c <= 0x36F) return true;                      // combining diacritics
  if (c == 0x37E || c == 0x387) return false;       // Greek question mark, ano teleia
  if (c <= 0x52F) return true;                      // Greek, Cyrillic
  if (c >= 0x530 && c <= 0x1FFF) {
    // Assorted scripts; exclude their common punctuation marks.
    switch (c) {
      case 0x589: case 0x5BE: case 0x5C0: case 0x5C3: case 0x5F3: case 0x5F4: case 0x60C:
      case 0x61B: case 0x61F: case 0x6D4: case 0x964: case 0x965: case 0xE2F: case 0x10FB:
        return false;
      default:
        return true;
    }
  }
  if (c >= 0x2000 && c <= 0x2BFF) return false;     // punctuation, symbols, arrows, dingbats
  if (c >= 0x2C00 && c <= 0x2DFF) return true;
  if (c >= 0x2E00 && c <= 0x2E7F) return false;
  if (c >= 0x3000 && c <= 0x303F) return c == 0x3005 || c == 0x3006;
  if (c >= 0x3040 && c <= 0x9FFF) return true;      // kana, CJK
  if (c >= 0xA000 && c <= 0xD7FF) return true;      // Yi, Hangul, ...
  if (c >= 0xD800 && c <= 0xF8FF) return false;     // surrogates, private use
  if (c >= 0xF900 && c <= 0xFAFF) return true;
  if (c >= 0xFB00 && c <= 0xFDFF) return true;      // presentation forms
  if (c >= 0xFE00 && c <= 0xFE6F) return false;     // variation selectors, small forms
  if (c >= 0xFE70 && c <= 0xFEFE) return true;
  if (c >= 0xFF00 && c <= 0xFFEF) {
    return (c >= 0xFF10 && c <= 0xFF19) || (c >= 0xFF21 && c <= 0xFF3A) ||
           (c >= 0xFF41 && c <= 0xFF5A) || (c >= 0xFF66 && c <= 0xFFDC);
  }
  if (c >= 0xFFF0 && c <= 0xFFFF) return false;     // specials, replacement character
  if (c >= 0x1F000 && c <= 0x1FFFF) return false;   // emoji and pictographs
  if (c >= 0xE0000) return false;                   // tags, variation selectors supplement
  return true;
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char32_t c : utf8_decode(s)) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::unordered_set<std::string> parse_stopwords(std::string_view text) {
  std::unordered_set<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.insert(line.substr(first, last - first + 1));
  }
  return out;
}

Tokenizer::Tokenizer(std::unordered_set<std::string> stopwords) : stopwords_(std::move(stopwords)) {}

const Tokenizer& Tokenizer::spanish() {
  static const Tokenizer t(parse_stopwords(bundled::kStopwordsEs));
  return t;
}

Tokenizer Tokenizer::from_stopword_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword list " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Tokenizer(parse_stopwords(ss.str()));
}

bool Tokenizer::is_stopword(std::string_view lower_word) const {
  return stopwords_.count(std::string(lower_word)) > 0;
}

TokenList Tokenizer::tokenize(std::string_view raw) const {
  TokenList out;
  std::u32string word;
  auto flush = [&] {
    if (word.empty()) return;
    std::string utf8 = utf8_encode(word);
    if (!is_stopword(utf8)) out.push_back(utf8_encode(stem_spanish(std::move(word))));
    word.clear();
  };
  for (char32_t c : utf8_decode(raw)) {
    if (is_word_char(c)) {
      word.push_back(to_lower(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

TokenList tokenize(std::string_view text) { return Tokenizer::spanish().tokenize(text); }

double SparseVector::norm() const {
  double s = 0;
  for (const auto& [d, w] : entries) s += w * w;
  return std::sqrt(s);
}

double SparseVector::dot(const SparseVector& other) const {
  double s = 0;
  auto a = entries.begin();
  auto b = other.entries.begin();
  while (a != entries.end() && b != other.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      s += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return s;
}

double SparseVector::at(std::uint32_t dim) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), dim,
                             [](const auto& e, std::uint32_t d) { return e.first < d; });
  return (it != entries.end() && it->first == dim) ? it->second : 0.0;
}

TfidfIndex TfidfIndex::build(std::span<const TokenList> docs) {
  TfidfIndex idx;
  idx.doc_count_ = docs.size();
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::vector<std::string_view> distinct(doc.begin(), doc.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (auto t : distinct) ++df[std::string(t)];
  }
  idx.terms_.reserve(df.size());
  for (auto& [term, count] : df) {
    auto dim = static_cast<std::uint32_t>(idx.terms_.size());
    idx.vocabulary_.emplace(term, dim);
    idx.terms_.push_back(term);
    idx.doc_freq_.push_back(count);
    idx.idf_.push_back(std::log(static_cast<double>(idx.doc_count_) / static_cast<double>(count)));
  }
  return idx;
}

std::optional<std::uint32_t> TfidfIndex::dimension(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfIndex::vectorize(const TokenList& doc) const {
  std::vector<std::uint32_t> dims;
  dims.reserve(doc.size());
  for (const auto& t : doc) {
    if (auto d = dimension(t)) dims.push_back(*d);
  }
  std::sort(dims.begin(), dims.end());
  SparseVector v;
  for (std::size_t i = 0; i < dims.size();) {
    std::size_t j = i;
    while (j < dims.size() && dims[j] == dims[i]) ++j;
    double w = static_cast<double>(j - i) * idf_[dims[i]];
    if (w != 0.0) v.entries.emplace_back(dims[i], w);
    i = j;
  }
  return v;
}

double cosine(const SparseVector& u, const SparseVector& v) {
  double nu = u.norm();
  double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(u.dot(v) / (nu * nv), 0.0, 1.0);
}

}  // namespace text
}  // namespace chatlens
