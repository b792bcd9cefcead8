#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parksent {

// 4-way attitude label. Unrelated marks sentences that mention a parking
// keyword without expressing an attitude toward parking.
enum class AttitudeLabel { Positive, Neutral, Negative, Unrelated };

inline constexpr int kNumLabels = 4;

inline std::string_view to_string(AttitudeLabel l) {
    switch (l) {
        case AttitudeLabel::Positive: return "positive";
        case AttitudeLabel::Neutral: return "neutral";
        case AttitudeLabel::Negative: return "negative";
        case AttitudeLabel::Unrelated: return "unrelated";
    }
    return "?";
}

inline std::optional<AttitudeLabel> parse_label(std::string_view s) {
    if (s == "positive" || s == "Positive") return AttitudeLabel::Positive;
    if (s == "neutral" || s == "Neutral") return AttitudeLabel::Neutral;
    if (s == "negative" || s == "Negative") return AttitudeLabel::Negative;
    if (s == "unrelated" || s == "Unrelated") return AttitudeLabel::Unrelated;
    return std::nullopt;
}

inline AttitudeLabel require_label(std::string_view s) {
    auto l = parse_label(s);
    if (!l) throw std::runtime_error("unknown attitude label: " + std::string(s));
    return *l;
}

}  // namespace parksent
