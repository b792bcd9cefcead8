#pragma once

// TF-IDF features over unigram/bigram counts.
// idf(t) = ln((1+N)/(1+df(t))) + 1; document vectors get unit L2 norm
// unless they are all-zero. Vocabulary order is lexicographic so feature
// indices are stable across runs.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace parksent::classify {

// index-sorted sparse row
struct SparseVec {
    std::vector<std::pair<int, double>> entries;

    double norm2() const {
        double s = 0.0;
        for (auto& [i, v] : entries) s += v * v;
        return std::sqrt(s);
    }
};

// lowercase word tokens; punctuation dropped, apostrophes kept in-word
inline std::vector<std::string> feature_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == '\'' && !cur.empty() && i + 1 < text.size() &&
                   std::isalnum(static_cast<unsigned char>(text[i + 1]))) {
            cur.push_back('\'');
        } else {
            flush();
        }
    }
    flush();
    return out;
}

struct TfidfModel {
    std::map<std::string, int> vocabulary;  // term -> column, lexicographic
    std::vector<double> idf;                // per column
    int min_df = 2;
    int ngram_lo = 1;
    int ngram_hi = 2;

    std::size_t dim() const { return vocabulary.size(); }

    std::vector<std::string> ngrams(std::string_view text) const {
        auto toks = feature_tokens(text);
        std::vector<std::string> out;
        for (int n = ngram_lo; n <= ngram_hi; ++n) {
            if (n <= 0 || toks.size() < static_cast<std::size_t>(n)) continue;
            for (std::size_t i = 0; i + n <= toks.size(); ++i) {
                std::string g = toks[i];
                for (int k = 1; k < n; ++k) g += " " + toks[i + k];
                out.push_back(std::move(g));
            }
        }
        return out;
    }

    SparseVec transform(std::string_view text) const {
        std::map<int, double> counts;
        for (const auto& g : ngrams(text)) {
            auto it = vocabulary.find(g);
            if (it != vocabulary.end()) counts[it->second] += 1.0;
        }
        SparseVec v;
        v.entries.reserve(counts.size());
        for (auto& [col, cnt] : counts)
            v.entries.emplace_back(col, cnt * idf[col]);
        double nrm = v.norm2();
        if (nrm > 0.0)
            for (auto& [col, val] : v.entries) val /= nrm;
        return v;
    }

    std::vector<SparseVec> transform_all(
            const std::vector<std::string>& texts) const {
        std::vector<SparseVec> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(transform(t));
        return out;
    }
};

inline TfidfModel build_tfidf(const std::vector<std::string>& texts,
                              int min_df = 2, int ngram_lo = 1,
                              int ngram_hi = 2) {
    if (texts.empty()) throw std::runtime_error("build_tfidf: empty corpus");
    TfidfModel m;
    m.min_df = min_df;
    m.ngram_lo = ngram_lo;
    m.ngram_hi = ngram_hi;

    std::unordered_map<std::string, int> df;
    for (const auto& t : texts) {
        std::unordered_set<std::string> seen;
        for (auto& g : m.ngrams(t)) seen.insert(std::move(g));
        for (const auto& g : seen) ++df[g];
    }
    for (const auto& [term, d] : df)
        if (d >= min_df) m.vocabulary.emplace(term, 0);
    int col = 0;
    for (auto& [term, idx] : m.vocabulary) idx = col++;

    const double n = static_cast<double>(texts.size());
    m.idf.assign(m.vocabulary.size(), 0.0);
    for (const auto& [term, idx] : m.vocabulary)
        m.idf[idx] = std::log((1.0 + n) / (1.0 + df[term])) + 1.0;
    return m;
}

namespace detail {

inline void check_classes_present(const std::vector<int>& y, int n_classes,
                                  const std::vector<std::string>& names) {
    std::vector<bool> seen(n_classes, false);
    for (int v : y) seen[v] = true;
    for (int c = 0; c < n_classes; ++c)
        if (!seen[c])
            throw std::runtime_error(
                "training labels contain no examples of class: " +
                (c < static_cast<int>(names.size()) ? names[c]
                                                    : std::to_string(c)));
}

}  // namespace detail

}  // namespace parksent::classify
