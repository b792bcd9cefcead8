#pragma once

// Lexical salience-valence tables over labeled sentences.
//
// A term counts once per sentence regardless of repeats. N_total counts
// every sentence containing the term (Neutral and Unrelated included);
// N_positive / N_negative count by label. salience = log10(N_total),
// valence = (N_positive - N_negative) / N_total. Terms below min_count or
// on the stopword list are omitted. Output is sorted by descending
// salience, ties by term.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "parksent/attitude.hpp"
#include "parksent/stopwords.hpp"
#include "parksent/tfidf.hpp"

namespace parksent::lsva {

struct LabeledSentence {
    std::string text;
    AttitudeLabel label = AttitudeLabel::Unrelated;
};

struct LsvaEntry {
    std::string term;
    long n_total = 0;
    long n_positive = 0;
    long n_negative = 0;
    double salience = 0.0;  // log10(n_total)
    double valence = 0.0;   // (n_positive - n_negative) / n_total
};

struct LsvaOptions {
    long min_count = 30;
    // empty set means: use the bundled default list
    std::unordered_set<std::string> stopwords;
    bool use_default_stopwords = true;
};

inline std::vector<LsvaEntry> compute_lsva(
        std::span<const LabeledSentence> sentences,
        const LsvaOptions& opt = {}) {
    struct Counts {
        long total = 0, pos = 0, neg = 0;
    };
    std::map<std::string, Counts> counts;
    for (const auto& s : sentences) {
        std::unordered_set<std::string> seen;
        for (auto& tok : classify::feature_tokens(s.text)) seen.insert(tok);
        for (const auto& term : seen) {
            auto& c = counts[term];
            ++c.total;
            if (s.label == AttitudeLabel::Positive) ++c.pos;
            else if (s.label == AttitudeLabel::Negative) ++c.neg;
        }
    }

    auto is_stopword = [&](const std::string& t) {
        if (!opt.stopwords.empty()) return opt.stopwords.count(t) > 0;
        if (opt.use_default_stopwords)
            return default_stopwords().count(t) > 0;
        return false;
    };

    std::vector<LsvaEntry> out;
    for (const auto& [term, c] : counts) {
        if (c.total < opt.min_count) continue;
        if (is_stopword(term)) continue;
        LsvaEntry e;
        e.term = term;
        e.n_total = c.total;
        e.n_positive = c.pos;
        e.n_negative = c.neg;
        e.salience = std::log10(double(c.total));
        e.valence = double(c.pos - c.neg) / double(c.total);
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const LsvaEntry& a, const LsvaEntry& b) {
        if (a.salience != b.salience) return a.salience > b.salience;
        return a.term < b.term;
    });
    return out;
}

inline std::unordered_set<std::string> load_stopword_file(
        const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path);
    std::unordered_set<std::string> out;
    std::string word;
    while (in >> word) out.insert(word);
    return out;
}

}  // namespace parksent::lsva
