#include "threatcrawl/sentences.hpp"

#include <cctype>
#include <unordered_set>

namespace threatcrawl {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word_byte(char c) {
    auto uc = static_cast<unsigned char>(c);
    return std::isalnum(uc) || c == '_' || uc >= 0x80;
}
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

const std::unordered_set<std::string> kAbbreviations = {
    "e.g", "i.e", "etc", "vs", "mr", "mrs", "ms", "dr", "prof", "inc", "ltd", "co", "corp", "fig",
    "no", "nos", "st", "jr", "sr", "approx", "al", "cf", "dept", "est", "jan", "feb", "mar", "apr",
    "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "u.s", "u.k", "e.u", "ca", "gen", "gov"};

// The word ending right before position `dot` (exclusive), lowercased.
std::string word_before(std::string_view s, std::size_t dot) {
    std::size_t start = dot;
    while (start > 0 && !is_space(s[start - 1]) && !is_opener(s[start - 1])) --start;
    std::string w(s.substr(start, dot - start));
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return w;
}

bool protected_period(std::string_view s, std::size_t dot) {
    std::string w = word_before(s, dot);
    if (w.empty()) return false;
    if (kAbbreviations.count(w)) return true;
    // Single-letter initial such as "J. Smith".
    return w.size() == 1 && std::isalpha(static_cast<unsigned char>(w[0]));
}

void split_paragraph(std::string_view para, std::vector<std::string>& out) {
    std::size_t start = 0;
    const std::size_t n = para.size();
    for (std::size_t i = 0; i < n; ++i) {
        char c = para[i];
        if (c != '.' && c != '!' && c != '?') continue;

        std::size_t j = i + 1;
        while (j < n && (para[j] == '.' || para[j] == '!' || para[j] == '?' || is_closer(para[j]))) ++j;
        if (j >= n) break;  // end of paragraph closes the sentence anyway
        if (!is_space(para[j])) continue;
        std::size_t k = j;
        while (k < n && is_space(para[k])) ++k;
        if (k >= n) break;
        std::size_t first = k;
        if (is_opener(para[first]) && first + 1 < n) ++first;
        auto next = static_cast<unsigned char>(para[first]);
        if (!std::isupper(next) && !std::isdigit(next)) continue;
        if (c == '.' && j == i + 1 && protected_period(para, i)) continue;

        out.emplace_back(para.substr(start, j - start));
        start = k;
        i = k - 1;
    }
    if (start < n) out.emplace_back(para.substr(start));
}

std::string collapse(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

}  // namespace

std::size_t sentence_token_count(std::string_view sentence) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < sentence.size()) {
        char c = sentence[i];
        if (is_space(c)) {
            ++i;
        } else if (is_word_byte(c)) {
            while (i < sentence.size() && is_word_byte(sentence[i])) ++i;
            ++count;
        } else {
            ++i;
            ++count;
        }
    }
    return count;
}

std::vector<std::string> split_sentences(std::string_view text, std::size_t min_tokens) {
    std::vector<std::string> raw;
    // Paragraphs are separated by a blank line.
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t brk = std::string_view::npos;
        for (std::size_t k = pos; k < text.size(); ++k) {
            if (text[k] != '\n') continue;
            std::size_t m = k + 1;
            while (m < text.size() && (text[m] == ' ' || text[m] == '\t' || text[m] == '\r')) ++m;
            if (m < text.size() && text[m] == '\n') {
                brk = k;
                break;
            }
        }
        std::string para = collapse(text.substr(pos, brk == std::string_view::npos ? text.npos : brk - pos));
        if (!para.empty()) split_paragraph(para, raw);
        if (brk == std::string_view::npos) break;
        pos = brk + 1;
    }

    std::vector<std::string> out;
    for (auto& s : raw) {
        std::string clean = collapse(s);
        if (!clean.empty() && sentence_token_count(clean) >= min_tokens) out.push_back(std::move(clean));
    }
    return out;
}

}  // namespace threatcrawl
