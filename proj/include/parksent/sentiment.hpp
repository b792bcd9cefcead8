#pragma once

// Numeric sentiment scores and their aggregation to POI / CBG / CBSA
// level. Label mapping: Positive -> +1, Neutral -> 0, Negative -> -1,
// Unrelated -> excluded from every count and mean. Region means pool
// sentence scores (so high-review POIs weigh more); averaging POI means
// instead is available via AggregationMode. Units below the minimum
// sentence count are excluded and counted.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parksent/attitude.hpp"
#include "parksent/corpus.hpp"
#include "parksent/wilcoxon.hpp"

namespace parksent::sentiment {

inline std::optional<double> score_label(AttitudeLabel l) {
    switch (l) {
        case AttitudeLabel::Positive: return 1.0;
        case AttitudeLabel::Neutral: return 0.0;
        case AttitudeLabel::Negative: return -1.0;
        case AttitudeLabel::Unrelated: return std::nullopt;
    }
    return std::nullopt;
}

inline std::vector<std::optional<double>> score_labels(
        std::span<const AttitudeLabel> labels) {
    std::vector<std::optional<double>> out;
    out.reserve(labels.size());
    for (auto l : labels) out.push_back(score_label(l));
    return out;
}

// one classified parking sentence joined to its POI/region metadata
struct SentenceRecord {
    std::string poi_id;
    corpus::PoiCategory category = corpus::PoiCategory::Other;
    std::string cbg_id;   // empty when the POI has no region assignment
    std::string cbsa_id;
    bool is_urban = false;
    AttitudeLabel label = AttitudeLabel::Unrelated;
};

struct PoiSentiment {
    std::string poi_id;
    corpus::PoiCategory category = corpus::PoiCategory::Other;
    long n_parking_sentences = 0;  // non-Unrelated only
    double weighted_sentiment = 0.0;
};

struct AggregationOptions {
    long min_count = 10;
    bool exclude_neutral = false;  // drop Neutral from means when set
};

struct PoiAggregate {
    std::vector<PoiSentiment> included;  // sorted by poi_id
    long excluded_pois = 0;              // below min_count
};

inline PoiAggregate aggregate_poi(std::span<const SentenceRecord> sentences,
                                  const AggregationOptions& opt = {}) {
    struct Acc {
        corpus::PoiCategory category;
        long n = 0;
        double sum = 0.0;
        long n_scored = 0;
    };
    std::map<std::string, Acc> acc;
    for (const auto& s : sentences) {
        auto score = score_label(s.label);
        if (!score) continue;  // Unrelated never changes counts or means
        auto& a = acc.try_emplace(s.poi_id, Acc{s.category}).first->second;
        a.category = s.category;
        ++a.n;
        if (opt.exclude_neutral && s.label == AttitudeLabel::Neutral) continue;
        a.sum += *score;
        ++a.n_scored;
    }
    PoiAggregate out;
    for (const auto& [poi_id, a] : acc) {
        if (a.n < opt.min_count || a.n_scored == 0) {
            ++out.excluded_pois;
            continue;
        }
        out.included.push_back(
            {poi_id, a.category, a.n, a.sum / double(a.n_scored)});
    }
    return out;
}

enum class RegionLevel { Cbg, Cbsa };

inline std::string_view to_string(RegionLevel l) {
    return l == RegionLevel::Cbg ? "cbg" : "cbsa";
}

enum class AggregationMode { PooledSentences, PoiMeans };

struct RegionSentiment {
    std::string region_id;
    RegionLevel level = RegionLevel::Cbg;
    long n_reviews = 0;  // parking sentences backing the mean
    double mean_sentiment = 0.0;
};

struct RegionAggregate {
    std::vector<RegionSentiment> included;  // sorted by region_id
    long excluded_regions = 0;
};

inline RegionAggregate aggregate_region(
        std::span<const SentenceRecord> sentences, RegionLevel level,
        const AggregationOptions& opt = {},
        AggregationMode mode = AggregationMode::PooledSentences) {
    auto region_of = [&](const SentenceRecord& s) -> const std::string& {
        return level == RegionLevel::Cbg ? s.cbg_id : s.cbsa_id;
    };

    struct Acc {
        long n = 0;
        double sum = 0.0;
        long n_scored = 0;
        std::map<std::string, std::pair<double, long>> per_poi;  // sum, count
    };
    std::map<std::string, Acc> acc;
    for (const auto& s : sentences) {
        const std::string& region = region_of(s);
        if (region.empty()) continue;  // unassigned POIs stay POI-level only
        auto score = score_label(s.label);
        if (!score) continue;
        auto& a = acc[region];
        ++a.n;
        if (opt.exclude_neutral && s.label == AttitudeLabel::Neutral) continue;
        a.sum += *score;
        ++a.n_scored;
        auto& pp = a.per_poi[s.poi_id];
        pp.first += *score;
        ++pp.second;
    }

    RegionAggregate out;
    for (const auto& [region, a] : acc) {
        if (a.n < opt.min_count || a.n_scored == 0) {
            ++out.excluded_regions;
            continue;
        }
        double mean;
        if (mode == AggregationMode::PooledSentences) {
            mean = a.sum / double(a.n_scored);
        } else {
            double s = 0.0;
            long k = 0;
            for (const auto& [poi, sc] : a.per_poi) {
                if (sc.second == 0) continue;
                s += sc.first / double(sc.second);
                ++k;
            }
            mean = k > 0 ? s / double(k) : 0.0;
        }
        out.included.push_back({region, level, a.n, mean});
    }
    return out;
}

struct RegionRanking {
    std::vector<RegionSentiment> top;     // most positive first
    std::vector<RegionSentiment> bottom;  // most negative first
    long filtered_out = 0;                // below min_cbgs
};

// cbg_counts: member-CBG count per region id (used for CBSA rankings);
// regions absent from the map count as 0.
inline RegionRanking rank_regions(
        std::vector<RegionSentiment> regions, std::size_t k, long min_cbgs,
        const std::map<std::string, long>& cbg_counts = {}) {
    RegionRanking out;
    if (min_cbgs > 0 && !cbg_counts.empty()) {
        auto keep = [&](const RegionSentiment& r) {
            auto it = cbg_counts.find(r.region_id);
            long c = it == cbg_counts.end() ? 0 : it->second;
            return c >= min_cbgs;
        };
        auto mid = std::stable_partition(regions.begin(), regions.end(), keep);
        out.filtered_out = static_cast<long>(regions.end() - mid);
        regions.erase(mid, regions.end());
    }
    std::stable_sort(regions.begin(), regions.end(),
                     [](const RegionSentiment& a, const RegionSentiment& b) {
                         if (a.mean_sentiment != b.mean_sentiment)
                             return a.mean_sentiment > b.mean_sentiment;
                         return a.region_id < b.region_id;
                     });
    const std::size_t kk = std::min(k, regions.size());
    out.top.assign(regions.begin(), regions.begin() + kk);
    out.bottom.assign(regions.rbegin(), regions.rbegin() + kk);
    return out;
}

// pairwise Wilcoxon matrix over per-POI sentiments grouped by category
struct WilcoxonCell {
    corpus::PoiCategory a, b;
    WilcoxonResult result;
};

inline std::vector<WilcoxonCell> pairwise_wilcoxon(
        const std::vector<PoiSentiment>& pois) {
    std::map<corpus::PoiCategory, std::vector<double>> groups;
    for (const auto& p : pois)
        groups[p.category].push_back(p.weighted_sentiment);
    std::vector<corpus::PoiCategory> cats;
    for (const auto& [c, v] : groups) cats.push_back(c);
    std::vector<WilcoxonCell> out;
    for (std::size_t i = 0; i < cats.size(); ++i)
        for (std::size_t j = i + 1; j < cats.size(); ++j) {
            WilcoxonCell cell;
            cell.a = cats[i];
            cell.b = cats[j];
            cell.result = wilcoxon_ranksum(groups[cats[i]], groups[cats[j]]);
            out.push_back(cell);
        }
    return out;
}

}  // namespace parksent::sentiment
