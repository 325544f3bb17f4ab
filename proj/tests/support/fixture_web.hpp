#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixture_server.hpp"
#include "threatcrawl/classifier.hpp"

namespace threatcrawl::testing {

// Word pools for synthetic text. Relevant text draws from a shared CTI core
// plus one pool per sub-label; off-topic text from unrelated pools.
const std::vector<std::string>& cti_core_words();
const std::vector<std::string>& label_words(Label label);
const std::vector<std::string>& filler_words();
const std::vector<std::string>& offtopic_words(int topic);  // topic in [0, 3)

class TextGenerator {
public:
    explicit TextGenerator(std::uint64_t seed) : rng_(seed) {}

    // One sentence of 8-12 words; `mix` lists pools and their weights.
    std::string sentence(const std::vector<std::pair<const std::vector<std::string>*, int>>& mix);
    std::vector<std::string> relevant_sentences(Label label, int n);
    std::vector<std::string> training_sentences(Label label, int n, int variant);
    std::vector<std::string> offtopic_sentences(int topic, int n);

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

struct FixtureWebOptions {
    std::uint64_t seed = 7;
    int relevant_pages = 20;
    int chains = 8;
    int chain_length = 5;
    int sentences_per_page = 24;
    int training_docs = 10;
};

struct FixtureWeb {
    std::map<std::string, std::string> pages;  // target -> html
    std::set<std::string> relevant;            // targets planted as relevant
    std::map<std::string, Label> page_label;   // relevant targets only
    std::map<std::string, std::vector<std::string>> links;  // target -> linked targets, repeats kept
    std::string seed_target;
    std::vector<LabeledDocument> training;  // held out, never served
};

FixtureWeb make_fixture_web(const FixtureWebOptions& options = {});

std::string render_page(const std::string& title, const std::vector<std::string>& sentences,
                        const std::vector<std::string>& body_links, const std::vector<std::string>& nav_links);

void serve_fixture_web(FixtureServer& server, const FixtureWeb& web);

}  // namespace threatcrawl::testing
