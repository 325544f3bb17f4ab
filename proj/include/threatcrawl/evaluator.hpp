#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "threatcrawl/classifier.hpp"
#include "threatcrawl/document_store.hpp"

namespace threatcrawl {

// Document indices per fold. Documents are grouped by label (enum order,
// input order within a label) and dealt round-robin over the folds, so fold
// sizes differ by at most one and every label is spread evenly.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const LabeledDocument> docs, int k);

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    double precision() const;
    double recall() const;
    double f1() const;
    std::size_t support() const { return tp + fn; }
    std::size_t total() const { return tp + fp + fn + tn; }
};

struct FoldMetrics {
    Label label = Label::TTPs;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    // Folds in which the label occurred or was predicted.
    int folds_counted = 0;
};

struct HeldOutPrediction {
    std::size_t doc_index = 0;
    int fold = 0;
    Label truth = Label::NotRelevant;
    std::optional<Label> assigned;
    bool relevant = false;
};

struct KFoldReport {
    int k = 0;
    std::vector<std::size_t> fold_sizes;
    // Sub-labels present in the corpus, then the aggregate Relevant row.
    std::vector<FoldMetrics> rows;
    // One-vs-rest counts summed over folds, keyed like `rows`.
    std::map<Label, ConfusionCounts> micro;
    std::vector<HeldOutPrediction> predictions;
    std::vector<std::string> warnings;
    double runtime_s = 0.0;

    const FoldMetrics* row(Label label) const;
};

// Per-label one-vs-rest counts for a set of predictions. The Relevant entry
// compares "truth is not NotRelevant" with the prediction's relevant flag.
std::map<Label, ConfusionCounts> confusion_counts(std::span<const HeldOutPrediction> predictions,
                                                  std::span<const Label> labels);

KFoldReport kfold_evaluate(std::span<const LabeledDocument> docs, int k, const EmbeddingBackend& backend,
                           const TrainingOptions& options);

std::string metrics_csv(const KFoldReport& report, const std::string& configuration);
std::string metrics_table(const KFoldReport& report, const std::string& configuration);

struct RankedSentence {
    std::size_t index = 0;
    std::string sentence;
    double similarity = 0.0;
};

// Sentences ranked by cosine similarity to the document embedding, highest
// first, ties in document order. Throws DomainError on an empty document.
std::vector<RankedSentence> most_important_sentences(std::span<const std::string> sentences,
                                                     const EmbeddingBackend& backend, const Budget& budget,
                                                     std::size_t top_k = 15);

// relevant / processed over the latest row per URL. Throws DomainError when
// nothing was processed.
double harvest_rate(std::span<const IndexRow> rows);

}  // namespace threatcrawl
