#pragma once

// Krippendorff's alpha for nominal data via the coincidence matrix.
//
// For each unit with m >= 2 labels, every ordered label pair contributes
// 1/(m-1) to the coincidence cell o[c][k]. With n = sum of all cells and
// n_c the row sums:
//   Do = (1/n) * sum_{c != k} o[c][k]
//   De = (1/(n(n-1))) * sum_{c != k} n_c * n_k
//   alpha = 1 - Do/De
// Units with fewer than two labels are ignored. When every label in every
// unit is identical De = 0; alpha is defined as 1 with a degenerate flag.

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace parksent::classify {

struct AgreementReport {
    double alpha = 0.0;
    double observed_disagreement = 0.0;  // Do
    double expected_disagreement = 0.0;  // De
    std::size_t units_used = 0;
    bool degenerate = false;             // De == 0 (no variation at all)
};

// labels: one row per unit, one entry per coder; nullopt = missing.
inline AgreementReport krippendorff_alpha(
        const std::vector<std::vector<std::optional<int>>>& labels) {
    if (labels.size() < 2)
        throw std::invalid_argument("krippendorff_alpha: need >= 2 units");
    std::size_t n_coders = labels.empty() ? 0 : labels[0].size();
    if (n_coders < 2)
        throw std::invalid_argument("krippendorff_alpha: need >= 2 coders");

    std::map<std::pair<int, int>, double> o;   // coincidence matrix
    std::map<int, double> n_c;                 // marginals
    double n = 0.0;
    std::size_t units_used = 0;

    for (const auto& unit : labels) {
        std::vector<int> vals;
        for (const auto& v : unit)
            if (v) vals.push_back(*v);
        const std::size_t m = vals.size();
        if (m < 2) continue;
        ++units_used;
        const double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                if (a == b) continue;
                o[{vals[a], vals[b]}] += w;
            }
    }
    if (units_used == 0)
        throw std::invalid_argument(
            "krippendorff_alpha: no unit has >= 2 labels");

    for (const auto& [ck, v] : o) {
        n_c[ck.first] += v;
        n += v;
    }

    AgreementReport r;
    r.units_used = units_used;
    double d_o = 0.0;
    for (const auto& [ck, v] : o)
        if (ck.first != ck.second) d_o += v;
    r.observed_disagreement = d_o / n;

    double cross = 0.0, sq = 0.0;
    for (const auto& [c, v] : n_c) {
        cross += v;
        sq += v * v;
    }
    double d_e = (cross * cross - sq) / (n * (n - 1.0));
    r.expected_disagreement = d_e;

    if (d_e <= 0.0) {
        r.degenerate = true;
        r.alpha = 1.0;
    } else {
        r.alpha = 1.0 - r.observed_disagreement / d_e;
    }
    return r;
}

}  // namespace parksent::classify
