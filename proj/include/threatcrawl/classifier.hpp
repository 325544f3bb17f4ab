#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "threatcrawl/embedding.hpp"
#include "threatcrawl/labels.hpp"

namespace threatcrawl {

enum class DistanceMode { Max, Average };

std::string_view distance_mode_name(DistanceMode mode);
std::optional<DistanceMode> parse_distance_mode(std::string_view name);

// Trained reference for one label: the normalized centroid direction, the
// radius inside which a document earns the label, and how many sentences of
// a document are embedded when comparing against it.
struct GroundTruth {
    Label label = Label::TTPs;
    EmbeddingVector vector;
    double allowed_distance = 0.0;
    int sentence_budget = 1;
    DistanceMode distance_mode = DistanceMode::Max;
};

using GroundTruthMap = std::map<Label, GroundTruth>;

struct LabeledDocument {
    std::string id;
    std::vector<std::string> sentences;
    Label label = Label::NotRelevant;
};

struct TrainingOptions {
    Budget budget = AdaptiveBudget{};
    DistanceMode distance_mode = DistanceMode::Max;
    // Also train a vector for the aggregate Relevant label from every
    // document carrying a sub-label (or Relevant itself).
    bool train_relevant_vector = false;
};

// NotRelevant documents are ignored. Documents without sentences are
// skipped. Throws DomainError when no label has a document or a label's
// embeddings sum to zero.
GroundTruthMap train_ground_truth(std::span<const LabeledDocument> docs, const EmbeddingBackend& backend,
                                  const TrainingOptions& options);

// Sentence budget a label gets under `budget`: n for Fixed(n); for Adaptive
// the mean of the per-document stop indices, rounded half up.
int derive_sentence_budget(std::span<const LabeledDocument* const> docs, const EmbeddingBackend& backend,
                           const Budget& budget);

enum class AssignmentRule {
    Relative,  // argmin of distance / allowed_distance
    Absolute,  // argmin of raw distance among admissible labels; for comparison only
};

double relative_distance(double distance, double allowed_distance);

ClassificationResult classify(std::span<const std::string> sentences, const GroundTruthMap& truths,
                              const EmbeddingBackend& backend, AssignmentRule rule = AssignmentRule::Relative);

// Scores an already-embedded document (snapshot per label budget).
ClassificationResult classify_embedding(const std::map<int, EmbeddingVector>& snapshots,
                                        const GroundTruthMap& truths,
                                        AssignmentRule rule = AssignmentRule::Relative);

// Inverted relevance score: the smallest relative distance. Throws
// DomainError for irrelevant results.
double relevance_rank_key(const ClassificationResult& result);

// Versioned JSON model file.
struct Model {
    static constexpr int kFormatVersion = 1;

    std::string backend_name;
    std::size_t dimension = 0;
    DistanceMode distance_mode = DistanceMode::Max;
    GroundTruthMap truths;
};

std::string serialize_model(const Model& model);
Model parse_model(const std::string& text);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace threatcrawl
