#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace threatcrawl {

// The four CTI sub-labels, the aggregate Relevant label (only trained in the
// optional fifth-vector mode) and the complement class NotRelevant. Enum
// order is the tie-break order for classification.
enum class Label { TTPs, BroadInformation, MalwareUsed, VulnerabilityTargeted, Relevant, NotRelevant };

inline constexpr std::array<Label, 4> kSubLabels = {
    Label::TTPs, Label::BroadInformation, Label::MalwareUsed, Label::VulnerabilityTargeted};

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view name);

struct LabelScore {
    Label label;
    double distance = 0.0;           // radians
    double relative_distance = 0.0;  // distance / allowed_distance
};

struct ClassificationResult {
    std::vector<LabelScore> scores;  // in Label order
    std::optional<Label> assigned;
    bool relevant = false;

    std::optional<LabelScore> best() const;
    const LabelScore* score_for(Label label) const;
};

}  // namespace threatcrawl
