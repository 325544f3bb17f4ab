#include "threatcrawl/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "threatcrawl/encoding.hpp"
#include "threatcrawl/log.hpp"

namespace threatcrawl {

using nlohmann::json;

std::string_view distance_mode_name(DistanceMode mode) {
    return mode == DistanceMode::Max ? "max" : "average";
}

std::optional<DistanceMode> parse_distance_mode(std::string_view name) {
    if (name == "max") return DistanceMode::Max;
    if (name == "average" || name == "avg" || name == "mean") return DistanceMode::Average;
    return std::nullopt;
}

int derive_sentence_budget(std::span<const LabeledDocument* const> docs, const EmbeddingBackend& backend,
                           const Budget& budget) {
    if (const auto* fixed = std::get_if<FixedBudget>(&budget)) return fixed->sentences;
    if (docs.empty()) throw DomainError("cannot derive a sentence budget without documents");

    double total = 0.0;
    for (const auto* doc : docs) {
        total += embed_document(doc->sentences, backend, budget).sentences_used;
    }
    double mean = total / static_cast<double>(docs.size());
    return std::max(1, static_cast<int>(std::floor(mean + 0.5)));
}

GroundTruthMap train_ground_truth(std::span<const LabeledDocument> docs, const EmbeddingBackend& backend,
                                  const TrainingOptions& options) {
    validate_budget(options.budget);

    std::map<Label, std::vector<const LabeledDocument*>> by_label;
    for (const auto& doc : docs) {
        if (doc.label == Label::NotRelevant) continue;
        if (doc.sentences.empty()) {
            log_warn("training: skipping document without sentences: " + doc.id);
            continue;
        }
        if (doc.label != Label::Relevant) by_label[doc.label].push_back(&doc);
        if (options.train_relevant_vector) by_label[Label::Relevant].push_back(&doc);
    }
    if (by_label.empty()) throw DomainError("training corpus has no labeled documents");

    GroundTruthMap truths;
    for (const auto& [label, members] : by_label) {
        GroundTruth gt;
        gt.label = label;
        gt.distance_mode = options.distance_mode;
        gt.sentence_budget = derive_sentence_budget(members, backend, options.budget);

        const Budget fixed = FixedBudget{gt.sentence_budget};
        std::vector<EmbeddingVector> embeddings;
        embeddings.reserve(members.size());
        EmbeddingVector sum;
        for (const auto* doc : members) {
            embeddings.push_back(embed_document(doc->sentences, backend, fixed).vector);
            add_into(sum, embeddings.back());
        }
        try {
            gt.vector = normalize(sum);
        } catch (const DomainError&) {
            throw DomainError("degenerate corpus: embeddings of label " + std::string(label_name(label)) +
                              " sum to zero");
        }

        double max_d = 0.0, total = 0.0;
        for (const auto& e : embeddings) {
            double d = angular_distance(e, gt.vector);
            max_d = std::max(max_d, d);
            total += d;
        }
        gt.allowed_distance =
            options.distance_mode == DistanceMode::Max ? max_d : total / static_cast<double>(embeddings.size());
        truths.emplace(label, std::move(gt));
    }
    return truths;
}

double relative_distance(double distance, double allowed_distance) {
    if (allowed_distance > 0.0) return distance / allowed_distance;
    return distance == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

ClassificationResult classify_embedding(const std::map<int, EmbeddingVector>& snapshots,
                                        const GroundTruthMap& truths, AssignmentRule rule) {
    ClassificationResult result;
    for (const auto& [label, gt] : truths) {
        auto it = snapshots.find(gt.sentence_budget);
        if (it == snapshots.end()) throw DomainError("missing embedding snapshot for budget");
        double d = angular_distance(it->second, gt.vector);
        result.scores.push_back({label, d, relative_distance(d, gt.allowed_distance)});
    }

    const LabelScore* chosen = nullptr;
    for (const auto& s : result.scores) {
        if (!(s.relative_distance <= 1.0)) continue;
        result.relevant = true;
        double key = rule == AssignmentRule::Relative ? s.relative_distance : s.distance;
        double best = !chosen ? 0.0 : (rule == AssignmentRule::Relative ? chosen->relative_distance : chosen->distance);
        // Scores are in Label order, so strict < keeps the first label on ties.
        if (!chosen || key < best) chosen = &s;
    }
    if (chosen) result.assigned = chosen->label;
    return result;
}

ClassificationResult classify(std::span<const std::string> sentences, const GroundTruthMap& truths,
                              const EmbeddingBackend& backend, AssignmentRule rule) {
    if (truths.empty()) throw DomainError("classify needs at least one ground truth");
    if (sentences.empty()) return {};

    std::vector<int> budgets;
    for (const auto& [_, gt] : truths) budgets.push_back(gt.sentence_budget);
    int max_budget = *std::max_element(budgets.begin(), budgets.end());

    auto doc = embed_document(sentences, backend, FixedBudget{max_budget}, budgets);
    return classify_embedding(doc.snapshots, truths, rule);
}

double relevance_rank_key(const ClassificationResult& result) {
    if (!result.relevant) throw DomainError("rank key requested for an irrelevant document");
    double key = std::numeric_limits<double>::infinity();
    for (const auto& s : result.scores) key = std::min(key, s.relative_distance);
    return key;
}

std::string serialize_model(const Model& model) {
    json labels = json::array();
    for (const auto& [label, gt] : model.truths) {
        labels.push_back({{"name", label_name(label)},
                          {"vector", encode_f64_le(gt.vector.values)},
                          {"allowed_distance", gt.allowed_distance},
                          {"sentence_budget", gt.sentence_budget}});
    }
    json root = {{"format_version", Model::kFormatVersion},
                 {"backend_name", model.backend_name},
                 {"D", model.dimension},
                 {"distance_mode", distance_mode_name(model.distance_mode)},
                 {"labels", std::move(labels)}};
    return root.dump(2) + "\n";
}

Model parse_model(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) throw std::runtime_error("model file is not valid JSON");
    int version = root.value("format_version", 0);
    if (version != Model::kFormatVersion) {
        throw std::runtime_error("unsupported model format_version " + std::to_string(version));
    }

    Model model;
    model.backend_name = root.at("backend_name").get<std::string>();
    model.dimension = root.at("D").get<std::size_t>();
    auto mode = parse_distance_mode(root.at("distance_mode").get<std::string>());
    if (!mode) throw std::runtime_error("unknown distance_mode in model file");
    model.distance_mode = *mode;

    for (const auto& entry : root.at("labels")) {
        auto label = parse_label(entry.at("name").get<std::string>());
        if (!label || *label == Label::NotRelevant) {
            throw std::runtime_error("model file names an invalid label");
        }
        auto values = decode_f64_le(entry.at("vector").get<std::string>());
        if (!values || values->size() != model.dimension) {
            throw std::runtime_error("model vector for " + std::string(label_name(*label)) + " is malformed");
        }
        GroundTruth gt;
        gt.label = *label;
        gt.vector.values = std::move(*values);
        gt.vector.normalized = true;
        gt.allowed_distance = entry.at("allowed_distance").get<double>();
        gt.sentence_budget = entry.at("sentence_budget").get<int>();
        gt.distance_mode = model.distance_mode;
        if (gt.sentence_budget < 1 || !(gt.allowed_distance >= 0.0)) {
            throw std::runtime_error("model entry for " + std::string(label_name(*label)) + " is out of range");
        }
        model.truths.emplace(*label, std::move(gt));
    }
    if (model.truths.empty()) throw std::runtime_error("model file has no labels");
    return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << serialize_model(model);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read model file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace threatcrawl
