#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cqa {

// Words are maximal runs of letters, digits and apostrophes (bytes >= 0x80
// count as letters so UTF-8 words stay whole), lowercased, with leading and
// trailing apostrophes trimmed.
std::vector<std::string> tokenize(std::string_view text);

// Sentences end at a run of '.', '!' or '?' that is followed by whitespace or
// end of text. No abbreviation handling. Segments are trimmed; blank ones are
// dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Vowel-group heuristic (a e i o u y), minus a silent trailing 'e' unless the
// word ends in "le"; never below 1.
int count_syllables(std::string_view word);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view text);

}  // namespace cqa
