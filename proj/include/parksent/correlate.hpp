#pragma once

// Univariable association summaries: correlations within each CBSA (over
// its member CBGs), correlations between CBSAs, and with/without-review
// cohort differences. The within-CBSA summary reports mean, median and
// pooled r side by side since any of the three is a defensible roll-up.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parksent/stats.hpp"
#include "parksent/wilcoxon.hpp"

namespace parksent::regress {

struct CbgObservation {
    std::string cbg_id;
    std::string cbsa_id;
    double sentiment = 0.0;
    std::vector<double> factors;  // aligned with the factor name list
};

struct WithinCbsaFactor {
    std::string factor;
    double mean_r = 0.0;
    double median_r = 0.0;
    double pooled_r = 0.0;
    double pooled_p = 1.0;
    double fraction_significant = 0.0;  // share of CBSAs with p < 0.001
    long n_cbsas = 0;
};

struct WithinCbsaReport {
    std::vector<WithinCbsaFactor> factors;
    long skipped_cbsas = 0;  // below min_cbgs
    // per-CBSA detail: cbsa -> factor -> r
    std::map<std::string, std::vector<std::optional<double>>> per_cbsa_r;
};

inline WithinCbsaReport within_cbsa_correlations(
        std::span<const CbgObservation> rows,
        const std::vector<std::string>& factor_names, long min_cbgs = 10) {
    std::map<std::string, std::vector<const CbgObservation*>> by_cbsa;
    for (const auto& r : rows) by_cbsa[r.cbsa_id].push_back(&r);

    WithinCbsaReport report;
    std::vector<std::vector<double>> rs(factor_names.size());
    std::vector<long> sig(factor_names.size(), 0);

    for (const auto& [cbsa, members] : by_cbsa) {
        if (static_cast<long>(members.size()) < min_cbgs) {
            ++report.skipped_cbsas;
            continue;
        }
        std::vector<double> y;
        y.reserve(members.size());
        for (auto* m : members) y.push_back(m->sentiment);
        auto& detail = report.per_cbsa_r[cbsa];
        detail.assign(factor_names.size(), std::nullopt);
        for (std::size_t f = 0; f < factor_names.size(); ++f) {
            std::vector<double> x;
            x.reserve(members.size());
            for (auto* m : members) x.push_back(m->factors[f]);
            try {
                auto p = stats::pearson(x, y);
                rs[f].push_back(p.r);
                detail[f] = p.r;
                if (p.p < 0.001) ++sig[f];
            } catch (const std::invalid_argument&) {
                // constant factor or sentiment inside this CBSA: skip
            }
        }
    }

    for (std::size_t f = 0; f < factor_names.size(); ++f) {
        WithinCbsaFactor out;
        out.factor = factor_names[f];
        out.n_cbsas = static_cast<long>(rs[f].size());
        if (!rs[f].empty()) {
            double sum = 0.0;
            for (double r : rs[f]) sum += r;
            out.mean_r = sum / double(rs[f].size());
            auto sorted = rs[f];
            std::sort(sorted.begin(), sorted.end());
            const std::size_t mid = sorted.size() / 2;
            out.median_r = sorted.size() % 2 ? sorted[mid]
                                             : 0.5 * (sorted[mid - 1] + sorted[mid]);
            out.fraction_significant = double(sig[f]) / double(rs[f].size());
        }
        // pooled estimate over all rows that sit in an included CBSA
        std::vector<double> px, py;
        for (const auto& [cbsa, members] : by_cbsa) {
            if (static_cast<long>(members.size()) < min_cbgs) continue;
            for (auto* m : members) {
                px.push_back(m->factors[f]);
                py.push_back(m->sentiment);
            }
        }
        try {
            auto p = stats::pearson(px, py);
            out.pooled_r = p.r;
            out.pooled_p = p.p;
        } catch (const std::invalid_argument&) {
        }
        report.factors.push_back(std::move(out));
    }
    return report;
}

struct CbsaObservation {
    std::string cbsa_id;
    double sentiment = 0.0;
    std::vector<double> factors;
    std::optional<int> category;  // set when segmenting by POI type
};

struct BetweenCbsaEntry {
    std::string factor;
    std::optional<int> category;
    double r = 0.0;
    double p = 1.0;
    long n = 0;
};

inline std::vector<BetweenCbsaEntry> between_cbsa_correlations(
        std::span<const CbsaObservation> rows,
        const std::vector<std::string>& factor_names,
        bool by_category = false) {
    std::map<std::optional<int>, std::vector<const CbsaObservation*>> groups;
    if (by_category) {
        for (const auto& r : rows) groups[r.category].push_back(&r);
    } else {
        for (const auto& r : rows) groups[std::nullopt].push_back(&r);
    }
    std::vector<BetweenCbsaEntry> out;
    for (const auto& [cat, members] : groups) {
        if (members.size() < 3) continue;
        for (std::size_t f = 0; f < factor_names.size(); ++f) {
            std::vector<double> x, y;
            for (auto* m : members) {
                x.push_back(m->factors[f]);
                y.push_back(m->sentiment);
            }
            BetweenCbsaEntry e;
            e.factor = factor_names[f];
            e.category = cat;
            e.n = static_cast<long>(members.size());
            try {
                auto p = stats::pearson(x, y);
                e.r = p.r;
                e.p = p.p;
            } catch (const std::invalid_argument&) {
                continue;
            }
            out.push_back(std::move(e));
        }
    }
    return out;
}

struct CohortDifference {
    std::string variable;
    double relative_difference = 0.0;  // (mean_with - mean_without)/mean_without
    bool absolute = false;             // set when the without-mean is zero
    double p_value = 1.0;              // rank-sum test
    double mean_with = 0.0;
    double mean_without = 0.0;
};

inline std::vector<CohortDifference> cohort_difference(
        std::span<const std::vector<double>> with_rows,
        std::span<const std::vector<double>> without_rows,
        const std::vector<std::string>& variable_names) {
    if (with_rows.empty() || without_rows.empty())
        throw std::invalid_argument("cohort_difference: empty cohort");
    std::vector<CohortDifference> out;
    for (std::size_t v = 0; v < variable_names.size(); ++v) {
        std::vector<double> a, b;
        for (const auto& r : with_rows) a.push_back(r[v]);
        for (const auto& r : without_rows) b.push_back(r[v]);
        CohortDifference d;
        d.variable = variable_names[v];
        double ma = 0.0, mb = 0.0;
        for (double x : a) ma += x;
        for (double x : b) mb += x;
        ma /= double(a.size());
        mb /= double(b.size());
        d.mean_with = ma;
        d.mean_without = mb;
        if (mb == 0.0) {
            d.absolute = true;
            d.relative_difference = ma - mb;
        } else {
            d.relative_difference = (ma - mb) / mb;
        }
        bool constant = true;
        for (double x : a)
            if (x != b[0]) constant = false;
        for (double x : b)
            if (x != b[0]) constant = false;
        d.p_value = constant
                        ? 1.0
                        : sentiment::wilcoxon_ranksum(a, b).p;
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace parksent::regress
