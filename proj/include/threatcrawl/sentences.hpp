#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace threatcrawl {

// Word and punctuation tokens ("A attacks." is three tokens).
std::size_t sentence_token_count(std::string_view sentence);

// Splits on . ! ? followed by whitespace and an uppercase letter or digit,
// and on paragraph breaks. Periods after known abbreviations and single
// initials do not split; periods inside tokens (v1.2.3, CVE ids) never do.
// Sentences with fewer than `min_tokens` tokens are dropped.
std::vector<std::string> split_sentences(std::string_view text, std::size_t min_tokens = 3);

}  // namespace threatcrawl
