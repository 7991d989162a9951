#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace chatlens::text {

// ---------------------------------------------------------------------------
// UTF-8 helpers

/// Decodes UTF-8; invalid sequences become U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
/// Number of Unicode scalar values.
std::size_t utf8_length(std::string_view s);

char32_t to_lower(char32_t c);
/// Letters, digits, combining marks and underscore. Everything else
/// (punctuation, symbols, emoji, whitespace, controls) separates tokens.
bool is_word_char(char32_t c);
bool is_space(char32_t c);
bool is_emoji(char32_t c);
bool contains_emoji(std::string_view s);

/// Whitespace-separated token count of raw text.
std::size_t word_count(std::string_view s);

// ---------------------------------------------------------------------------
// Tokenization

/// Stemmed, stopword-free, lower-case tokens.
using TokenList = std::vector<std::string>;

class Tokenizer {
 public:
  explicit Tokenizer(std::unordered_set<std::string> stopwords);

  /// Uses the bundled Spanish stopword list.
  static const Tokenizer& spanish();
  static Tokenizer from_stopword_file(const std::string& path);

  /// Lower-case, replace punctuation and symbols by spaces, split on spaces,
  /// drop stopwords, and stem the rest.
  TokenList tokenize(std::string_view text) const;

  bool is_stopword(std::string_view lower_word) const;

 private:
  std::unordered_set<std::string> stopwords_;
};

/// Tokenizer::spanish().tokenize(text).
TokenList tokenize(std::string_view text);

/// Parses a one-word-per-line list; blank lines and `#` lines are ignored.
std::unordered_set<std::string> parse_stopwords(std::string_view text);

// ---------------------------------------------------------------------------
// TF-IDF

/// Non-zero entries sorted by dimension.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  double norm() const;
  double dot(const SparseVector& other) const;
  bool empty() const { return entries.empty(); }
  /// Weight at a dimension, 0 when absent.
  double at(std::uint32_t dim) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

class TfidfIndex {
 public:
  TfidfIndex() = default;
  /// Vocabulary over all distinct terms, dimensions assigned in sorted term order.
  static TfidfIndex build(std::span<const TokenList> docs);

  std::size_t doc_count() const { return doc_count_; }
  std::size_t size() const { return terms_.size(); }
  std::optional<std::uint32_t> dimension(std::string_view term) const;
  const std::string& term(std::uint32_t dim) const { return terms_[dim]; }
  std::size_t doc_freq(std::uint32_t dim) const { return doc_freq_[dim]; }
  /// ln(doc_count / doc_freq).
  double idf(std::uint32_t dim) const { return idf_[dim]; }

  /// term count x idf; out-of-vocabulary terms are ignored.
  SparseVector vectorize(const TokenList& doc) const;

 private:
  std::unordered_map<std::string, std::uint32_t> vocabulary_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
};

/// <u,v> / (|u||v|), 0 when either vector is zero.
double cosine(const SparseVector& u, const SparseVector& v);

}  // namespace chatlens::text
