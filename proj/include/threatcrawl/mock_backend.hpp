#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/embedding.hpp"

namespace threatcrawl {

// Tokens used by the mock backend: whitespace split, lowercased, with
// leading/trailing ASCII punctuation stripped (a token made only of
// punctuation is kept as is).
std::vector<std::string> mock_tokens(std::string_view text);

// Pseudo-random unit vector for one token, keyed by (token, seed).
EmbeddingVector mock_token_vector(std::string_view token, std::uint64_t seed, std::size_t dim);

// Sum of the token vectors of `text`. Deterministic in (text, seed, dim).
EmbeddingVector mock_embed_sentence(std::string_view text, std::uint64_t seed, std::size_t dim);

// Deterministic bag-of-words backend for tests and offline runs.
class MockBackend : public EmbeddingBackend {
public:
    explicit MockBackend(std::uint64_t seed = 42, std::size_t dim = 256, double scale = 1.0);

    std::string name() const override;
    std::size_t dimension() const override { return dim_; }
    EmbeddingVector embed_sentence(std::string_view text) const override;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::size_t dim_;
    double scale_;
};

}  // namespace threatcrawl
