#pragma once

#include <string>
#include <string_view>

namespace chatlens::text {

/// Snowball Spanish stemmer. Input is expected in lower case; accents are
/// handled by the algorithm and acute accents are removed in its final step.
std::u32string stem_spanish(std::u32string word);
std::string stem_spanish(std::string_view utf8_word);

}  // namespace chatlens::text
