#pragma once

// Rule-based valence-sum classifier. A sentence's label depends only on
// the signed sum of matched term valences: > 0 Positive, < 0 Negative,
// = 0 with at least one match Neutral, no match Unrelated.

#include <string>
#include <unordered_map>

#include "parksent/attitude.hpp"
#include "parksent/csv.hpp"
#include "parksent/tfidf.hpp"

namespace parksent::classify {

struct LexiconModel {
    std::unordered_map<std::string, double> valence;

    AttitudeLabel classify(std::string_view text) const {
        double sum = 0.0;
        int matches = 0;
        for (const auto& tok : feature_tokens(text)) {
            auto it = valence.find(tok);
            if (it == valence.end()) continue;
            sum += it->second;
            ++matches;
        }
        if (matches == 0) return AttitudeLabel::Unrelated;
        if (sum > 0.0) return AttitudeLabel::Positive;
        if (sum < 0.0) return AttitudeLabel::Negative;
        return AttitudeLabel::Neutral;
    }
};

inline LexiconModel load_lexicon(const std::string& path) {
    auto t = csvio::read_file(path);
    int c_term = t.require_column("term");
    int c_val = t.require_column("valence");
    LexiconModel m;
    for (const auto& row : t.rows) {
        auto v = csvio::to_double(row[c_val]);
        if (!v)
            throw csvio::CsvError("lexicon: bad valence for term " + row[c_term]);
        m.valence[row[c_term]] = *v;
    }
    return m;
}

}  // namespace parksent::classify
