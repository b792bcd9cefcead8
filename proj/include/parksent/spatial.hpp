#pragma once

// Spatial weights and autocorrelation.
//
// Weights are row-standardized: every row with at least one neighbor sums
// to 1. Islands (no neighbors) are tracked, get no weight mass, and are
// excluded from S0.
//
// Global Moran's I = (n/S0) * sum_ij w_ij z_i z_j / sum_i z_i^2 with
// z = v - mean(v). The permutation p-value is two-sided around the null
// expectation E[I] = -1/(n-1): p = (count_extreme + 1)/(n_perm + 1).
//
// Local I_i = z_i * lag_i / (sum_k z_k^2 / n). The pseudo p-value uses
// conditional permutation (value i held fixed, the rest resampled without
// replacement) with the directional counting rule: replicates at least as
// extreme as the observed I_i on its own side. Each region draws from its
// own seed-derived stream, so parallel evaluation cannot change results.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parksent/csv.hpp"
#include "parksent/rng.hpp"

namespace parksent::spatial {

struct SpatialWeights {
    std::size_t n = 0;
    std::vector<std::string> region_ids;            // index -> id
    std::vector<std::vector<int>> neighbors;        // per region
    std::vector<std::vector<double>> weights;       // row-standardized
    std::vector<int> islands;                       // indices with no neighbor

    double s0() const {
        double s = 0.0;
        for (const auto& row : weights)
            s += std::accumulate(row.begin(), row.end(), 0.0);
        return s;
    }
};

namespace detail {

inline double haversine_km(double lat1, double lng1, double lat2, double lng2) {
    constexpr double kRadiusKm = 6371.0088;
    constexpr double kDeg = 3.14159265358979323846 / 180.0;
    const double dlat = (lat2 - lat1) * kDeg;
    const double dlng = (lng2 - lng1) * kDeg;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) *
                         std::sin(dlng / 2) * std::sin(dlng / 2);
    return 2.0 * kRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

inline void row_standardize(SpatialWeights& w) {
    w.islands.clear();
    for (std::size_t i = 0; i < w.n; ++i) {
        double sum = std::accumulate(w.weights[i].begin(), w.weights[i].end(),
                                     0.0);
        if (w.neighbors[i].empty() || sum <= 0.0) {
            w.islands.push_back(static_cast<int>(i));
            w.weights[i].clear();
            w.neighbors[i].clear();
            continue;
        }
        for (double& v : w.weights[i]) v /= sum;
    }
}

}  // namespace detail

struct Centroid {
    std::string region_id;
    double lat = 0.0;
    double lng = 0.0;
};

// k nearest neighbors by great-circle distance; distance ties break by
// region id so duplicate centroids stay deterministic.
inline SpatialWeights build_knn_weights(std::span<const Centroid> centroids,
                                        int k) {
    const std::size_t n = centroids.size();
    if (k < 1) throw std::invalid_argument("build_knn_weights: k must be >= 1");
    if (n <= static_cast<std::size_t>(k))
        throw std::invalid_argument(
            "build_knn_weights: need more regions than neighbors (n > k)");
    for (const auto& c : centroids)
        if (!std::isfinite(c.lat) || !std::isfinite(c.lng))
            throw std::invalid_argument("build_knn_weights: non-finite centroid");

    SpatialWeights w;
    w.n = n;
    w.region_ids.reserve(n);
    for (const auto& c : centroids) w.region_ids.push_back(c.region_id);
    w.neighbors.assign(n, {});
    w.weights.assign(n, {});

    std::vector<std::pair<double, int>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist.emplace_back(
                detail::haversine_km(centroids[i].lat, centroids[i].lng,
                                     centroids[j].lat, centroids[j].lng),
                static_cast<int>(j));
        }
        std::sort(dist.begin(), dist.end(),
                  [&](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return w.region_ids[a.second] < w.region_ids[b.second];
                  });
        for (int m = 0; m < k; ++m) {
            w.neighbors[i].push_back(dist[m].second);
            w.weights[i].push_back(1.0);
        }
    }
    detail::row_standardize(w);
    return w;
}

// symmetric adjacency from an edge list; regions not named by any edge
// become islands
inline SpatialWeights build_adjacency_weights(
        std::span<const std::string> region_ids,
        std::span<const std::pair<std::string, std::string>> edges) {
    SpatialWeights w;
    w.n = region_ids.size();
    w.region_ids.assign(region_ids.begin(), region_ids.end());
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < w.n; ++i)
        index[w.region_ids[i]] = static_cast<int>(i);
    std::vector<std::vector<bool>> adj(w.n, std::vector<bool>(w.n, false));
    for (const auto& [a, b] : edges) {
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end())
            throw std::invalid_argument("adjacency edge names unknown region: " + a);
        if (ib == index.end())
            throw std::invalid_argument("adjacency edge names unknown region: " + b);
        if (ia->second == ib->second) continue;  // self loops ignored
        adj[ia->second][ib->second] = true;
        adj[ib->second][ia->second] = true;
    }
    w.neighbors.assign(w.n, {});
    w.weights.assign(w.n, {});
    for (std::size_t i = 0; i < w.n; ++i)
        for (std::size_t j = 0; j < w.n; ++j)
            if (adj[i][j]) {
                w.neighbors[i].push_back(static_cast<int>(j));
                w.weights[i].push_back(1.0);
            }
    detail::row_standardize(w);
    return w;
}

// adjacency file: CSV with columns region_a,region_b
inline SpatialWeights build_adjacency_weights_from_file(
        std::span<const std::string> region_ids, const std::string& path) {
    auto t = csvio::read_file(path);
    int ca = t.require_column("region_a");
    int cb = t.require_column("region_b");
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& row : t.rows) edges.emplace_back(row[ca], row[cb]);
    return build_adjacency_weights(region_ids, edges);
}

struct MoranResult {
    double i = 0.0;
    double expected_i = 0.0;  // -1/(n-1)
    double p_value = 1.0;
    int n_permutations = 0;
    std::size_t n = 0;
};

namespace detail {

inline double moran_stat(const SpatialWeights& w, std::span<const double> z,
                         double z2_sum, double s0) {
    double num = 0.0;
    for (std::size_t i = 0; i < w.n; ++i) {
        const auto& nb = w.neighbors[i];
        const auto& wt = w.weights[i];
        double lag = 0.0;
        for (std::size_t m = 0; m < nb.size(); ++m) lag += wt[m] * z[nb[m]];
        num += z[i] * lag;
    }
    return (double(w.n) / s0) * num / z2_sum;
}

}  // namespace detail

inline MoranResult morans_i(std::span<const double> values,
                            const SpatialWeights& w, int n_permutations,
                            std::uint64_t seed) {
    if (values.size() != w.n)
        throw std::invalid_argument("morans_i: values/weights size mismatch");
    const std::size_t n = w.n;
    if (n < 2) throw std::invalid_argument("morans_i: need n >= 2");

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= double(n);
    std::vector<double> z(n);
    double z2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = values[i] - mean;
        z2 += z[i] * z[i];
    }
    if (z2 <= 0.0) throw std::invalid_argument("morans_i: constant surface");

    const double s0 = w.s0();
    if (s0 <= 0.0) throw std::invalid_argument("morans_i: empty weights");

    MoranResult res;
    res.n = n;
    res.expected_i = -1.0 / double(n - 1);
    res.i = detail::moran_stat(w, z, z2, s0);
    res.n_permutations = n_permutations;

    if (n_permutations > 0) {
        const double dev = std::abs(res.i - res.expected_i);
        int extreme = 0;
        std::vector<double> perm(z.begin(), z.end());
        for (int m = 0; m < n_permutations; ++m) {
            auto eng = rng::derive(seed, 50000 + m);
            rng::shuffle(perm, eng);
            double i_m = detail::moran_stat(w, perm, z2, s0);
            if (std::abs(i_m - res.expected_i) >= dev - 1e-12) ++extreme;
        }
        res.p_value = double(extreme + 1) / double(n_permutations + 1);
    }
    return res;
}

enum class LisaCluster { HH, LL, HL, LH, NotSignificant };

inline std::string_view to_string(LisaCluster c) {
    switch (c) {
        case LisaCluster::HH: return "HH";
        case LisaCluster::LL: return "LL";
        case LisaCluster::HL: return "HL";
        case LisaCluster::LH: return "LH";
        case LisaCluster::NotSignificant: return "NS";
    }
    return "?";
}

struct LisaResult {
    std::string region_id;
    double local_i = 0.0;
    double p_value = 1.0;
    LisaCluster cluster = LisaCluster::NotSignificant;
};

inline std::vector<LisaResult> lisa(std::span<const double> values,
                                    const SpatialWeights& w,
                                    int n_permutations, double alpha,
                                    std::uint64_t seed) {
    if (values.size() != w.n)
        throw std::invalid_argument("lisa: values/weights size mismatch");
    const std::size_t n = w.n;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= double(n);
    std::vector<double> z(n);
    double z2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = values[i] - mean;
        z2 += z[i] * z[i];
    }
    if (z2 <= 0.0) throw std::invalid_argument("lisa: constant surface");
    const double m2 = z2 / double(n);

    std::vector<LisaResult> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = out[i];
        r.region_id = w.region_ids[i];
        const auto& nb = w.neighbors[i];
        const auto& wt = w.weights[i];
        if (nb.empty()) {  // island: no lag, never significant
            r.local_i = 0.0;
            r.p_value = 1.0;
            r.cluster = LisaCluster::NotSignificant;
            continue;
        }
        double lag = 0.0;
        for (std::size_t m = 0; m < nb.size(); ++m) lag += wt[m] * z[nb[m]];
        r.local_i = z[i] * lag / m2;

        // conditional permutation: draw |nb| values from z without index i
        std::vector<double> others;
        others.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) others.push_back(z[j]);
        auto eng = rng::derive(seed, 90000 + i);
        int as_extreme = 0;
        const std::size_t kk = nb.size();
        std::vector<double> draw(kk);
        for (int m = 0; m < n_permutations; ++m) {
            // partial Fisher-Yates: first kk entries form the draw
            for (std::size_t t = 0; t < kk; ++t) {
                std::size_t j = t + rng::uniform_index(eng, others.size() - t);
                std::swap(others[t], others[j]);
                draw[t] = others[t];
            }
            double lag_m = 0.0;
            for (std::size_t t = 0; t < kk; ++t) lag_m += wt[t] * draw[t];
            double i_m = z[i] * lag_m / m2;
            if (r.local_i >= 0.0 ? i_m >= r.local_i - 1e-12
                                 : i_m <= r.local_i + 1e-12)
                ++as_extreme;
        }
        r.p_value = double(as_extreme + 1) / double(n_permutations + 1);
        if (r.p_value < alpha) {
            if (z[i] >= 0.0)
                r.cluster = lag >= 0.0 ? LisaCluster::HH : LisaCluster::HL;
            else
                r.cluster = lag >= 0.0 ? LisaCluster::LH : LisaCluster::LL;
        } else {
            r.cluster = LisaCluster::NotSignificant;
        }
    }
    return out;
}

}  // namespace parksent::spatial
