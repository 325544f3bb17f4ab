#include "threatcrawl/embedding.hpp"

#include <algorithm>
#include <cmath>

namespace threatcrawl {

namespace {

void require_same_dim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw DomainError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
}

// Adaptive embedding asks the backend for sentences in chunks so a remote
// backend is not hit once per sentence.
constexpr std::size_t kAdaptiveChunk = 16;

}  // namespace

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

double norm(const EmbeddingVector& v) {
    double s = 0.0;
    for (double x : v.values) s += x * x;
    return std::sqrt(s);
}

EmbeddingVector normalize(const EmbeddingVector& v) {
    double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite vector");
    EmbeddingVector out;
    out.values.resize(v.values.size());
    for (std::size_t i = 0; i < v.values.size(); ++i) out.values[i] = v.values[i] / n;
    out.normalized = true;
    return out;
}

void add_into(EmbeddingVector& acc, const EmbeddingVector& v) {
    if (acc.values.empty()) acc.values.assign(v.values.size(), 0.0);
    require_same_dim(acc, v);
    for (std::size_t i = 0; i < v.values.size(); ++i) acc.values[i] += v.values[i];
    acc.normalized = false;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    require_same_dim(a, b);
    double na = norm(a), nb = norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("cosine similarity of a zero vector");
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double angular_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
    require_same_dim(u, v);
    EmbeddingVector a = u.normalized ? u : normalize(u);
    EmbeddingVector b = v.normalized ? v : normalize(v);
    double diff = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        double d = a.values[i] - b.values[i];
        double s = a.values[i] + b.values[i];
        diff += d * d;
        sum += s * s;
    }
    return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

std::vector<EmbeddingVector> EmbeddingBackend::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_sentence(t));
    return out;
}

void validate_budget(const Budget& budget) {
    if (const auto* fixed = std::get_if<FixedBudget>(&budget)) {
        if (fixed->sentences < 1) throw DomainError("fixed sentence budget must be >= 1");
    } else {
        const auto& adaptive = std::get<AdaptiveBudget>(budget);
        if (!(adaptive.gradient_limit > 0.0)) throw DomainError("gradient limit must be > 0");
        if (adaptive.hard_cap < 2) throw DomainError("adaptive hard cap must be >= 2");
    }
}

DocumentEmbedding embed_document(std::span<const std::string> sentences, const EmbeddingBackend& backend,
                                 const Budget& budget, std::span<const int> snapshot_at) {
    if (sentences.empty()) throw DomainError("cannot embed an empty document");
    validate_budget(budget);

    const auto* fixed = std::get_if<FixedBudget>(&budget);
    const auto* adaptive = std::get_if<AdaptiveBudget>(&budget);
    const std::size_t limit =
        std::min(sentences.size(), static_cast<std::size_t>(fixed ? fixed->sentences : adaptive->hard_cap));

    DocumentEmbedding doc;
    EmbeddingVector running;
    EmbeddingVector previous;  // normalized S_{i-1}
    std::map<int, EmbeddingVector> kept;
    for (int k : snapshot_at) {
        if (k < 1) throw DomainError("snapshot index must be >= 1");
        kept.emplace(k, EmbeddingVector{});
    }

    std::size_t next = 0;
    bool stop = false;
    while (!stop && next < limit) {
        std::size_t chunk = fixed ? limit - next : std::min(kAdaptiveChunk, limit - next);
        auto vectors = backend.embed_batch(sentences.subspan(next, chunk));
        if (vectors.size() != chunk) throw BackendError("backend returned a wrong number of vectors");

        for (auto& v : vectors) {
            if (v.dim() != backend.dimension()) throw BackendError("backend returned a wrong dimension");
            add_into(running, v);
            ++next;
            EmbeddingVector current = normalize(running);
            if (next >= 2) {
                double g = angular_distance(previous, current);
                doc.gradients.push_back(g);
                if (adaptive && g < adaptive->gradient_limit) stop = true;
            }
            if (auto it = kept.find(static_cast<int>(next)); it != kept.end()) it->second = current;
            previous = std::move(current);
            if (stop) break;
        }
    }

    doc.sentences_used = static_cast<int>(next);
    doc.vector = previous;
    for (auto& [k, v] : kept) {
        doc.snapshots[k] = k > doc.sentences_used ? doc.vector : std::move(v);
    }
    return doc;
}

}  // namespace threatcrawl
