#include "threatcrawl/mock_backend.hpp"

#include <cctype>
#include <sstream>

namespace threatcrawl {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::vector<std::string> mock_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i) break;

        std::string_view raw = text.substr(start, i - start);
        std::string_view core = raw;
        while (!core.empty() && std::ispunct(static_cast<unsigned char>(core.front()))) core.remove_prefix(1);
        while (!core.empty() && std::ispunct(static_cast<unsigned char>(core.back()))) core.remove_suffix(1);
        if (core.empty()) core = raw;

        std::string token(core);
        for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(token));
    }
    return out;
}

EmbeddingVector mock_token_vector(std::string_view token, std::uint64_t seed, std::size_t dim) {
    std::uint64_t state = fnv1a(token);
    std::uint64_t key = seed;
    state ^= splitmix64(key);

    EmbeddingVector v;
    v.values.resize(dim);
    for (auto& x : v.values) {
        // 53 random bits mapped onto [-1, 1).
        double unit = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        x = 2.0 * unit - 1.0;
    }
    return normalize(v);
}

EmbeddingVector mock_embed_sentence(std::string_view text, std::uint64_t seed, std::size_t dim) {
    if (dim < 2) throw DomainError("mock backend dimension must be >= 2");
    auto tokens = mock_tokens(text);
    if (tokens.empty()) throw DomainError("cannot embed a sentence without tokens");
    EmbeddingVector sum;
    for (const auto& t : tokens) add_into(sum, mock_token_vector(t, seed, dim));
    return sum;
}

MockBackend::MockBackend(std::uint64_t seed, std::size_t dim, double scale)
    : seed_(seed), dim_(dim), scale_(scale) {
    if (dim < 2) throw DomainError("mock backend dimension must be >= 2");
    if (!(scale > 0.0)) throw DomainError("mock backend scale must be positive");
}

std::string MockBackend::name() const {
    std::ostringstream ss;
    ss << "mock:" << seed_ << ":" << dim_;
    return ss.str();
}

EmbeddingVector MockBackend::embed_sentence(std::string_view text) const {
    EmbeddingVector v = mock_embed_sentence(text, seed_, dim_);
    if (scale_ != 1.0) {
        for (auto& x : v.values) x *= scale_;
    }
    return v;
}

}  // namespace threatcrawl
