#include "chatlens/stemmer.hpp"

#include <initializer_list>
#include <optional>

#include "chatlens/text.hpp"

namespace chatlens::text {

namespace {

using Word = std::u32string;
using Suffixes = std::initializer_list<std::u32string_view>;

bool is_vowel(char32_t c) {
  switch (c) {
    case U'a': case U'e': case U'i': case U'o': case U'u':
    case U'á': case U'é': case U'í': case U'ó': case U'ú': case U'ü':
      return true;
    default:
      return false;
  }
}

struct Regions {
  std::size_t rv, r1, r2;
};

std::size_t after_next(const Word& w, std::size_t from, bool want_vowel) {
  for (std::size_t i = from; i < w.size(); ++i) {
    if (is_vowel(w[i]) == want_vowel) return i + 1;
  }
  return w.size();
}

Regions mark_regions(const Word& w) {
  const std::size_t n = w.size();
  Regions r{n, n, n};
  if (n >= 2) {
    if (is_vowel(w[0])) {
      // vowel-consonant: after the next vowel; vowel-vowel: after the next consonant.
      r.rv = after_next(w, 2, !is_vowel(w[1]));
    } else if (!is_vowel(w[1])) {
      r.rv = after_next(w, 2, true);
    } else if (n >= 3) {
      r.rv = 3;
    }
  }
  std::size_t v = after_next(w, 0, true);
  r.r1 = v >= n ? n : after_next(w, v, false);
  v = after_next(w, r.r1, true);
  r.r2 = v >= n ? n : after_next(w, v, false);
  return r;
}

bool has_suffix_at(const Word& w, std::size_t end, std::u32string_view s) {
  return s.size() <= end && std::u32string_view(w).substr(end - s.size(), s.size()) == s;
}

/// Longest candidate ending at `end` and starting at or after `min_start`.
std::optional<std::u32string_view> longest(const Word& w, std::size_t end, std::size_t min_start,
                                           Suffixes candidates) {
  std::optional<std::u32string_view> best;
  for (auto s : candidates) {
    if (s.size() > end || end - s.size() < min_start) continue;
    if ((!best || s.size() > best->size()) && has_suffix_at(w, end, s)) best = s;
  }
  return best;
}

bool one_of(std::u32string_view s, Suffixes set) {
  for (auto x : set) {
    if (x == s) return true;
  }
  return false;
}

void attached_pronoun(Word& w, const Regions& r) {
  auto pronoun = longest(w, w.size(), 0,
                         {U"me", U"se", U"sela", U"selo", U"selas", U"selos", U"la", U"le", U"lo",
                          U"las", U"les", U"los", U"nos"});
  if (!pronoun) return;
  const std::size_t pron_start = w.size() - pronoun->size();
  auto ending = longest(w, pron_start, 0,
                        {U"iéndo", U"ándo", U"ár", U"ér", U"ír", U"ando", U"iendo", U"ar", U"er",
                         U"ir", U"yendo"});
  if (!ending) return;
  const std::size_t start = pron_start - ending->size();
  if (start < r.rv) return;
  if (*ending == U"iéndo") {
    w.replace(start, Word::npos, U"iendo");
  } else if (*ending == U"ándo") {
    w.replace(start, Word::npos, U"ando");
  } else if (*ending == U"ár") {
    w.replace(start, Word::npos, U"ar");
  } else if (*ending == U"ér") {
    w.replace(start, Word::npos, U"er");
  } else if (*ending == U"ír") {
    w.replace(start, Word::npos, U"ir");
  } else if (*ending == U"yendo") {
    if (start > 0 && w[start - 1] == U'u') w.erase(pron_start);
  } else {
    w.erase(pron_start);
  }
}

bool standard_suffix(Word& w, const Regions& r) {
  static constexpr Suffixes kPlain = {U"anza", U"anzas", U"ico", U"ica", U"icos", U"icas",
                                      U"ismo", U"ismos", U"able", U"ables", U"ible", U"ibles",
                                      U"ista", U"istas", U"oso", U"osa", U"osos", U"osas",
                                      U"amiento", U"amientos", U"imiento", U"imientos"};
  static constexpr Suffixes kAdor = {U"adora", U"ador", U"ación", U"adoras", U"adores",
                                     U"aciones", U"ante", U"antes", U"ancia", U"ancias"};
  static constexpr Suffixes kLogia = {U"logía", U"logías"};
  static constexpr Suffixes kUcion = {U"ución", U"uciones"};
  static constexpr Suffixes kEncia = {U"encia", U"encias"};
  static constexpr Suffixes kAmente = {U"amente"};
  static constexpr Suffixes kMente = {U"mente"};
  static constexpr Suffixes kIdad = {U"idad", U"idades"};
  static constexpr Suffixes kIva = {U"iva", U"ivo", U"ivas", U"ivos"};

  std::optional<std::u32string_view> best;
  for (Suffixes group : {kPlain, kAdor, kLogia, kUcion, kEncia, kAmente, kMente, kIdad, kIva}) {
    auto m = longest(w, w.size(), 0, group);
    if (m && (!best || m->size() > best->size())) best = m;
  }
  if (!best) return false;
  const std::u32string_view s = *best;
  const std::size_t start = w.size() - s.size();

  auto delete_in_r2 = [&](std::u32string_view suffix) {
    if (!has_suffix_at(w, w.size(), suffix)) return false;
    std::size_t at = w.size() - suffix.size();
    if (at < r.r2) return false;
    w.erase(at);
    return true;
  };

  if (one_of(s, kPlain)) {
    if (start < r.r2) return false;
    w.erase(start);
  } else if (one_of(s, kAdor)) {
    if (start < r.r2) return false;
    w.erase(start);
    delete_in_r2(U"ic");
  } else if (one_of(s, kLogia)) {
    if (start < r.r2) return false;
    w.replace(start, Word::npos, U"log");
  } else if (one_of(s, kUcion)) {
    if (start < r.r2) return false;
    w.replace(start, Word::npos, U"u");
  } else if (one_of(s, kEncia)) {
    if (start < r.r2) return false;
    w.replace(start, Word::npos, U"ente");
  } else if (one_of(s, kAmente)) {
    if (start < r.r1) return false;
    w.erase(start);
    if (auto m = longest(w, w.size(), 0, {U"iv", U"os", U"ic", U"ad"})) {
      std::size_t at = w.size() - m->size();
      if (at >= r.r2) {
        bool iv = *m == U"iv";
        w.erase(at);
        if (iv) delete_in_r2(U"at");
      }
    }
  } else if (one_of(s, kMente)) {
    if (start < r.r2) return false;
    w.erase(start);
    if (auto m = longest(w, w.size(), 0, {U"ante", U"able", U"ible"})) delete_in_r2(*m);
  } else if (one_of(s, kIdad)) {
    if (start < r.r2) return false;
    w.erase(start);
    if (auto m = longest(w, w.size(), 0, {U"abil", U"ic", U"iv"})) delete_in_r2(*m);
  } else {  // kIva
    if (start < r.r2) return false;
    w.erase(start);
    delete_in_r2(U"at");
  }
  return true;
}

bool y_verb_suffix(Word& w, const Regions& r) {
  auto m = longest(w, w.size(), r.rv,
                   {U"ya", U"ye", U"yan", U"yen", U"yeron", U"yendo", U"yo", U"yó", U"yas", U"yes",
                    U"yais", U"yamos"});
  if (!m) return false;
  const std::size_t start = w.size() - m->size();
  if (start == 0 || w[start - 1] != U'u') return false;
  w.erase(start);
  return true;
}

bool verb_suffix(Word& w, const Regions& r) {
  static constexpr Suffixes kGue = {U"en", U"es", U"éis", U"emos"};
  auto m = longest(
      w, w.size(), r.rv,
      {U"en",      U"es",      U"éis",     U"emos",    U"arían",   U"arías",   U"arán",
       U"arás",    U"aríais",  U"aría",    U"aréis",   U"aríamos", U"aremos",  U"ará",
       U"aré",     U"erían",   U"erías",   U"erán",    U"erás",    U"eríais",  U"ería",
       U"eréis",   U"eríamos", U"eremos",  U"erá",     U"eré",     U"irían",   U"irías",
       U"irán",    U"irás",    U"iríais",  U"iría",    U"iréis",   U"iríamos", U"iremos",
       U"irá",     U"iré",     U"aba",     U"ada",     U"ida",     U"ía",      U"ara",
       U"iera",    U"ad",      U"ed",      U"id",      U"ase",     U"iese",    U"aste",
       U"iste",    U"an",      U"aban",    U"ían",     U"aran",    U"ieran",   U"asen",
       U"iesen",   U"aron",    U"ieron",   U"ado",     U"ido",     U"ando",    U"iendo",
       U"ió",      U"ar",      U"er",      U"ir",      U"as",      U"abas",    U"adas",
       U"idas",    U"ías",     U"aras",    U"ieras",   U"ases",    U"ieses",   U"ís",
       U"áis",     U"abais",   U"íais",    U"arais",   U"ierais",  U"aseis",   U"ieseis",
       U"asteis",  U"isteis",  U"ados",    U"idos",    U"amos",    U"ábamos",  U"íamos",
       U"imos",    U"áramos",  U"iéramos", U"iésemos", U"ásemos"});
  if (!m) return false;
  std::size_t start = w.size() - m->size();
  if (one_of(*m, kGue) && start >= 2 && w[start - 1] == U'u' && w[start - 2] == U'g') --start;
  w.erase(start);
  return true;
}

void residual_suffix(Word& w, const Regions& r) {
  auto m = longest(w, w.size(), 0, {U"os", U"a", U"o", U"á", U"í", U"ó", U"e", U"é"});
  if (!m) return;
  const std::size_t start = w.size() - m->size();
  if (start < r.rv) return;
  w.erase(start);
  if ((*m == U"e" || *m == U"é") && has_suffix_at(w, w.size(), U"u")) {
    std::size_t u = w.size() - 1;
    if (u >= 1 && w[u - 1] == U'g' && u >= r.rv) w.erase(u);
  }
}

void postlude(Word& w) {
  for (char32_t& c : w) {
    switch (c) {
      case U'á': c = U'a'; break;
      case U'é': c = U'e'; break;
      case U'í': c = U'i'; break;
      case U'ó': c = U'o'; break;
      case U'ú': c = U'u'; break;
      default: break;
    }
  }
}

}  // namespace

std::u32string stem_spanish(std::u32string w) {
  const Regions r = mark_regions(w);
  attached_pronoun(w, r);
  if (!standard_suffix(w, r) && !y_verb_suffix(w, r)) verb_suffix(w, r);
  residual_suffix(w, r);
  postlude(w);
  return w;
}

std::string stem_spanish(std::string_view utf8_word) {
  return utf8_encode(stem_spanish(utf8_decode(utf8_word)));
}

}  // namespace chatlens::text
