#pragma once

// Two-sample Wilcoxon rank-sum (Mann-Whitney U), two-sided.
//
// U is computed from mid-ranks, so ties are handled uniformly. The exact
// p-value is a permutation enumeration over the observed pooled values:
// all C(n_a+n_b, n_a) group assignments are enumerated and the two-sided
// p is the share of assignments whose U is at least as far from the null
// mean n_a*n_b/2 as the observed U. This is well-defined with or without
// ties and reduces to the classical exact distribution when there are
// none. Larger samples use the normal approximation with tie correction
// and a 0.5 continuity correction.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parksent/stats.hpp"

namespace parksent::sentiment {

enum class WilcoxonMethod { Auto, Exact, Normal };

struct WilcoxonResult {
    double u = 0.0;        // U statistic of the first sample
    double p = 1.0;        // two-sided
    bool exact = false;
    std::size_t n_a = 0, n_b = 0;
};

namespace detail {

// mid-ranks of the pooled sample (1-based)
inline std::vector<double> midranks(const std::vector<double>& pooled_sorted) {
    const std::size_t n = pooled_sorted.size();
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled_sorted[j + 1] == pooled_sorted[i]) ++j;
        const double r = 0.5 * (double(i + 1) + double(j + 1));
        for (std::size_t k = i; k <= j; ++k) rank[k] = r;
        i = j + 1;
    }
    return rank;
}

// Enumerates all C(n, k) subsets of {0..n-1}; calls fn with the sum of
// rank[i] over the chosen subset.
template <typename Fn>
void enumerate_rank_sums(const std::vector<double>& rank, std::size_t k,
                         Fn&& fn) {
    const std::size_t n = rank.size();
    std::vector<std::size_t> comb(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = i;
    while (true) {
        double sum = 0.0;
        for (std::size_t i : comb) sum += rank[i];
        fn(sum);
        // next combination
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (comb[i] != i + n - k) {
                ++comb[i];
                for (std::size_t j = i + 1; j < k; ++j)
                    comb[j] = comb[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
        if (k == 0) return;
    }
}

}  // namespace detail

inline WilcoxonResult wilcoxon_ranksum(std::span<const double> a,
                                       std::span<const double> b,
                                       WilcoxonMethod method
                                       = WilcoxonMethod::Auto) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("wilcoxon_ranksum: empty sample");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    // pool, sort, mid-rank
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(n);
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = pooled[i].first;
    auto rank = detail::midranks(values);

    double r_a = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (pooled[i].second == 0) r_a += rank[i];
    const double u_a = r_a - double(na) * double(na + 1) / 2.0;

    WilcoxonResult res;
    res.n_a = na;
    res.n_b = nb;
    res.u = u_a;

    bool use_exact;
    switch (method) {
        case WilcoxonMethod::Exact: use_exact = true; break;
        case WilcoxonMethod::Normal: use_exact = false; break;
        case WilcoxonMethod::Auto: {
            bool has_ties = std::adjacent_find(values.begin(), values.end()) !=
                            values.end();
            use_exact = n <= 16 && !has_ties;
            break;
        }
    }

    const double mean_u = double(na) * double(nb) / 2.0;
    if (use_exact) {
        const double min_rank_sum = double(na) * double(na + 1) / 2.0;
        const double dev = std::abs(u_a - mean_u);
        long long extreme = 0, total = 0;
        detail::enumerate_rank_sums(rank, na, [&](double rank_sum) {
            const double u = rank_sum - min_rank_sum;
            ++total;
            if (std::abs(u - mean_u) >= dev - 1e-9) ++extreme;
        });
        res.exact = true;
        res.p = double(extreme) / double(total);
    } else {
        // tie correction sum t^3 - t over tied groups
        double tie_sum = 0.0;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && values[j + 1] == values[i]) ++j;
            const double t = double(j - i + 1);
            tie_sum += t * t * t - t;
            i = j + 1;
        }
        const double var_u =
            double(na) * double(nb) / 12.0 *
            (double(n + 1) - tie_sum / (double(n) * double(n - 1)));
        if (var_u <= 0.0) {
            res.p = 1.0;  // completely tied data carries no evidence
        } else {
            const double z =
                (std::max(std::abs(u_a - mean_u) - 0.5, 0.0)) / std::sqrt(var_u);
            res.p = stats::normal_two_sided(z);
        }
        res.exact = false;
    }
    if (res.p > 1.0) res.p = 1.0;
    if (res.p <= 0.0) res.p = std::numeric_limits<double>::min();
    return res;
}

}  // namespace parksent::sentiment
