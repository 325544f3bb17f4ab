#include "threatcrawl/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "threatcrawl/log.hpp"

namespace threatcrawl {

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const LabeledDocument> docs, int k) {
    if (k < 2) throw DomainError("k-fold needs k >= 2");
    if (docs.size() < static_cast<std::size_t>(k)) throw DomainError("fewer documents than folds");

    std::map<Label, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < docs.size(); ++i) by_label[docs[i].label].push_back(i);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (const auto& [label, indices] : by_label) {
        for (auto idx : indices) folds[next++ % k].push_back(idx);
    }
    return folds;
}

double ConfusionCounts::precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }

double ConfusionCounts::recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }

double ConfusionCounts::f1() const {
    double p = precision(), r = recall();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

const FoldMetrics* KFoldReport::row(Label label) const {
    for (const auto& r : rows) {
        if (r.label == label) return &r;
    }
    return nullptr;
}

std::map<Label, ConfusionCounts> confusion_counts(std::span<const HeldOutPrediction> predictions,
                                                  std::span<const Label> labels) {
    std::map<Label, ConfusionCounts> out;
    for (Label label : labels) {
        auto& c = out[label];
        for (const auto& p : predictions) {
            bool actual, predicted;
            if (label == Label::Relevant) {
                actual = p.truth != Label::NotRelevant;
                predicted = p.relevant;
            } else {
                actual = p.truth == label;
                predicted = p.assigned == label;
            }
            if (actual && predicted) ++c.tp;
            else if (!actual && predicted) ++c.fp;
            else if (actual) ++c.fn;
            else ++c.tn;
        }
    }
    return out;
}

KFoldReport kfold_evaluate(std::span<const LabeledDocument> docs, int k, const EmbeddingBackend& backend,
                           const TrainingOptions& options) {
    auto started = std::chrono::steady_clock::now();
    KFoldReport report;
    report.k = k;
    auto folds = stratified_folds(docs, k);

    std::map<Label, std::size_t> per_label;
    for (const auto& d : docs) ++per_label[d.label];
    std::vector<Label> labels;
    for (Label l : kSubLabels) {
        if (per_label.count(l)) labels.push_back(l);
    }
    labels.push_back(Label::Relevant);
    for (const auto& [label, count] : per_label) {
        if (count < static_cast<std::size_t>(k)) {
            report.warnings.push_back(std::string(label_name(label)) + " has " + std::to_string(count) +
                                      " documents, fewer than k=" + std::to_string(k) +
                                      "; some folds will not contain it");
            log_warn(report.warnings.back());
        }
    }

    std::map<Label, FoldMetrics> sums;
    for (Label l : labels) sums[l].label = l;

    for (int f = 0; f < k; ++f) {
        report.fold_sizes.push_back(folds[f].size());
        std::vector<LabeledDocument> train;
        for (int g = 0; g < k; ++g) {
            if (g == f) continue;
            for (auto idx : folds[g]) train.push_back(docs[idx]);
        }
        auto truths = train_ground_truth(train, backend, options);

        std::vector<HeldOutPrediction> fold_predictions;
        for (auto idx : folds[f]) {
            auto result = classify(docs[idx].sentences, truths, backend);
            fold_predictions.push_back({idx, f, docs[idx].label, result.assigned, result.relevant});
        }

        auto counts = confusion_counts(fold_predictions, labels);
        for (Label l : labels) {
            const auto& c = counts[l];
            auto& m = report.micro[l];
            m.tp += c.tp;
            m.fp += c.fp;
            m.fn += c.fn;
            m.tn += c.tn;
            if (c.tp + c.fp + c.fn == 0) continue;  // label absent from this fold entirely
            auto& s = sums[l];
            s.precision += c.precision();
            s.recall += c.recall();
            s.f1 += c.f1();
            s.support += c.support();
            ++s.folds_counted;
        }
        report.predictions.insert(report.predictions.end(), fold_predictions.begin(), fold_predictions.end());
    }

    for (Label l : labels) {
        auto m = sums[l];
        if (m.folds_counted > 0) {
            m.precision /= m.folds_counted;
            m.recall /= m.folds_counted;
            m.f1 /= m.folds_counted;
        }
        report.rows.push_back(m);
    }
    report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::string metrics_csv(const KFoldReport& report, const std::string& configuration) {
    std::ostringstream out;
    out << "configuration,label,precision,recall,f1,support,runtime_s\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& r : report.rows) {
        out << configuration << ',' << label_name(r.label) << ',' << r.precision << ',' << r.recall << ',' << r.f1
            << ',' << r.support << ',' << report.runtime_s << '\n';
    }
    return out.str();
}

std::string metrics_table(const KFoldReport& report, const std::string& configuration) {
    std::ostringstream out;
    out << configuration << " (k=" << report.k << ", " << std::fixed << std::setprecision(2) << report.runtime_s
        << " s)\n";
    out << std::left << std::setw(24) << "label" << std::right << std::setw(8) << "Prec" << std::setw(8) << "Rec"
        << std::setw(8) << "F1" << std::setw(9) << "support" << '\n';
    out << std::string(57, '-') << '\n';
    for (const auto& r : report.rows) {
        out << std::left << std::setw(24) << label_name(r.label) << std::right << std::setprecision(3)
            << std::setw(8) << r.precision << std::setw(8) << r.recall << std::setw(8) << r.f1 << std::setw(9)
            << r.support << '\n';
    }
    return out.str();
}

std::vector<RankedSentence> most_important_sentences(std::span<const std::string> sentences,
                                                     const EmbeddingBackend& backend, const Budget& budget,
                                                     std::size_t top_k) {
    if (sentences.empty()) throw DomainError("document has no sentences");
    auto doc = embed_document(sentences, backend, budget);
    auto vectors = backend.embed_batch(sentences);

    std::vector<RankedSentence> ranked;
    ranked.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        double sim = 0.0;
        if (norm(vectors[i]) > 0.0) sim = cosine_similarity(vectors[i], doc.vector);
        ranked.push_back({i, sentences[i], sim});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedSentence& a, const RankedSentence& b) { return a.similarity > b.similarity; });
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
}

double harvest_rate(std::span<const IndexRow> rows) {
    std::size_t processed = 0, relevant = 0;
    for (const auto& r : rows) {
        if (!r.processed) continue;
        ++processed;
        if (r.relevant) ++relevant;
    }
    if (processed == 0) throw DomainError("harvest rate of an index without processed documents");
    return static_cast<double>(relevant) / processed;
}

}  // namespace threatcrawl
