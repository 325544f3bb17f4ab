#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "threatcrawl/classifier.hpp"

// Straightforward recomputations used to check the library. They share no
// code with it beyond EmbeddingBackend::embed_sentence.
namespace threatcrawl::oracle {

using Vec = std::vector<double>;

Vec embed(const EmbeddingBackend& backend, const std::string& sentence);
Vec unit(const Vec& v);
double arccos_angle(const Vec& a, const Vec& b);

// Normalized sum of the first min(n, size) sentence vectors.
Vec document_vector(const EmbeddingBackend& backend, const std::vector<std::string>& sentences, std::size_t n);

// Sentences consumed before the gradient first drops below `limit`.
int adaptive_stop(const EmbeddingBackend& backend, const std::vector<std::string>& sentences, double limit,
                  int hard_cap);

struct Truth {
    Vec vector;
    double allowed = 0.0;
    int budget = 0;
};

std::map<Label, Truth> train(const std::vector<LabeledDocument>& docs, const EmbeddingBackend& backend,
                             const TrainingOptions& options);

struct Score {
    Label label;
    double distance;
    double relative;
};

struct Verdict {
    std::vector<Score> scores;
    bool relevant = false;
    bool has_label = false;
    Label label = Label::NotRelevant;
};

Verdict classify(const std::vector<std::string>& sentences, const std::map<Label, Truth>& truths,
                 const EmbeddingBackend& backend, bool absolute = false);

std::size_t union_find_components(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

// Pages processed by a focused crawl over `graph` from `seeds`: a page is
// processed when reached; its links are followed only if it is relevant.
// When follow_all is set, every page's links are followed.
std::set<std::string> simulate_crawl(const std::map<std::string, std::vector<std::string>>& graph,
                                     const std::set<std::string>& relevant, const std::vector<std::string>& seeds,
                                     bool follow_all = false);

}  // namespace threatcrawl::oracle
