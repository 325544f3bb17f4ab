#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace threatcrawl {

// Raised for mathematically undefined inputs: zero vectors, empty
// documents, mismatched dimensions.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when an embedding backend cannot produce a vector (transport
// failure, bad response).
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EmbeddingVector {
    std::vector<double> values;
    bool normalized = false;

    std::size_t dim() const { return values.size(); }
};

double dot(const EmbeddingVector& a, const EmbeddingVector& b);
double norm(const EmbeddingVector& v);
EmbeddingVector normalize(const EmbeddingVector& v);
void add_into(EmbeddingVector& acc, const EmbeddingVector& v);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Angle between u and v in [0, pi]; equal to arccos(clamp(cos_sim, -1, 1)).
// Evaluated as 2*atan2(|u^ - v^|, |u^ + v^|), which keeps full precision for
// nearly parallel vectors where arccos does not.
double angular_distance(const EmbeddingVector& u, const EmbeddingVector& v);

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual EmbeddingVector embed_sentence(std::string_view text) const = 0;

    // Default: one embed_sentence call per entry.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;

    // Whether embed_sentence may be called from several threads at once.
    virtual bool supports_concurrent_calls() const { return true; }
};

struct FixedBudget {
    int sentences = 50;
};

struct AdaptiveBudget {
    double gradient_limit = 0.02;
    int hard_cap = 200;
};

using Budget = std::variant<FixedBudget, AdaptiveBudget>;

void validate_budget(const Budget& budget);

struct DocumentEmbedding {
    EmbeddingVector vector;  // normalized running sum at the stop index
    int sentences_used = 0;
    // gradients[j] is the angle moved when sentence j+2 was added.
    std::vector<double> gradients;
    // Normalized running sum after k sentences, for each requested k
    // (clamped to sentences_used).
    std::map<int, EmbeddingVector> snapshots;
};

DocumentEmbedding embed_document(std::span<const std::string> sentences, const EmbeddingBackend& backend,
                                 const Budget& budget, std::span<const int> snapshot_at = {});

}  // namespace threatcrawl
