#include "threatcrawl/labels.hpp"

namespace threatcrawl {

std::string_view label_name(Label label) {
    switch (label) {
        case Label::TTPs: return "TTPs";
        case Label::BroadInformation: return "BroadInformation";
        case Label::MalwareUsed: return "MalwareUsed";
        case Label::VulnerabilityTargeted: return "VulnerabilityTargeted";
        case Label::Relevant: return "Relevant";
        case Label::NotRelevant: return "NotRelevant";
    }
    return "?";
}

std::optional<Label> parse_label(std::string_view name) {
    for (Label l : {Label::TTPs, Label::BroadInformation, Label::MalwareUsed,
                    Label::VulnerabilityTargeted, Label::Relevant, Label::NotRelevant}) {
        if (label_name(l) == name) return l;
    }
    return std::nullopt;
}

std::optional<LabelScore> ClassificationResult::best() const {
    std::optional<LabelScore> out;
    for (const auto& s : scores) {
        if (!out || s.relative_distance < out->relative_distance) out = s;
    }
    return out;
}

const LabelScore* ClassificationResult::score_for(Label label) const {
    for (const auto& s : scores) {
        if (s.label == label) return &s;
    }
    return nullptr;
}

}  // namespace threatcrawl
