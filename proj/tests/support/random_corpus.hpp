#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "threatcrawl/classifier.hpp"

namespace threatcrawl::testing {

struct RandomCorpus {
    std::vector<LabeledDocument> training;
    std::vector<std::vector<std::string>> probes;  // unlabeled documents to classify
    TrainingOptions options;
    int label_count = 0;  // trained vectors, including the aggregate one
};

// 3-5 trained vectors (5 means four sub-labels plus the aggregate Relevant
// vector), 2-10 documents per label, random sentences drawn from a
// label-skewed vocabulary, and a random budget and distance mode.
RandomCorpus make_random_corpus(std::uint64_t seed, int probes = 10);

}  // namespace threatcrawl::testing

namespace threatcrawl::testing {

// Trains and classifies `corpus` with the library and with the oracle and
// returns a description of the first disagreement beyond `tolerance`.
// Relevance and label decisions are compared only where every relative
// distance is farther than `tolerance` from the boundary or a tie.
std::optional<std::string> compare_with_oracle(const RandomCorpus& corpus, const EmbeddingBackend& backend,
                                               double tolerance = 1e-9);

}  // namespace threatcrawl::testing
