#pragma once

// CART decision trees (Gini impurity, midpoint thresholds) and a random
// forest: bootstrap resampling and sqrt(d) feature subsampling from
// seed-derived streams, majority vote with lowest-class tie break.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parksent/rng.hpp"
#include "parksent/tfidf.hpp"

namespace parksent::classify {

// column-major dense view used during tree construction
struct DenseData {
    std::size_t n = 0, d = 0;
    std::vector<std::vector<double>> columns;  // d columns of length n

    static DenseData from_sparse(const std::vector<SparseVec>& X,
                                 std::size_t dim) {
        DenseData dd;
        dd.n = X.size();
        dd.d = dim;
        dd.columns.assign(dim, std::vector<double>(dd.n, 0.0));
        for (std::size_t i = 0; i < X.size(); ++i)
            for (auto& [j, v] : X[i].entries) dd.columns[j][i] = v;
        return dd;
    }
};

struct TreeNode {
    int feature = -1;          // -1 for leaf
    double threshold = 0.0;    // goes left if x < threshold
    int left = -1, right = -1;
    int label = 0;             // majority label (valid everywhere)
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int n_classes = 0;

    int predict(const SparseVec& x) const {
        int cur = 0;
        while (nodes[cur].feature >= 0) {
            double v = 0.0;
            for (auto& [j, val] : x.entries)
                if (j == nodes[cur].feature) {
                    v = val;
                    break;
                }
            cur = v < nodes[cur].threshold ? nodes[cur].left : nodes[cur].right;
        }
        return nodes[cur].label;
    }
};

struct TreeParams {
    int max_depth = 0;           // 0 = unlimited
    int min_samples_leaf = 1;
    int max_features = 0;        // 0 = all features at each split
};

namespace detail {

inline double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (int c : counts) {
        double p = double(c) / double(total);
        g -= p * p;
    }
    return g;
}

inline int majority(const std::vector<int>& counts) {
    int best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = static_cast<int>(c);
    return best;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exhaustive best-split search over the candidate features: sort samples
// by value, evaluate every midpoint between distinct adjacent values.
inline SplitChoice best_split(const DenseData& data,
                              const std::vector<int>& y,
                              const std::vector<std::size_t>& idx,
                              const std::vector<int>& features, int n_classes,
                              int min_samples_leaf) {
    SplitChoice best;
    const int n = static_cast<int>(idx.size());
    std::vector<int> total_counts(n_classes, 0);
    for (std::size_t i : idx) ++total_counts[y[i]];
    const double parent = gini(total_counts, n);

    std::vector<std::pair<double, int>> vals(idx.size());
    for (int f : features) {
        const auto& col = data.columns[f];
        for (std::size_t k = 0; k < idx.size(); ++k)
            vals[k] = {col[idx[k]], y[idx[k]]};
        std::sort(vals.begin(), vals.end());
        std::vector<int> left_counts(n_classes, 0);
        int n_left = 0;
        for (int k = 0; k + 1 < n; ++k) {
            ++left_counts[vals[k].second];
            ++n_left;
            if (vals[k].first == vals[k + 1].first) continue;
            if (n_left < min_samples_leaf || n - n_left < min_samples_leaf)
                continue;
            std::vector<int> right_counts(n_classes);
            for (int c = 0; c < n_classes; ++c)
                right_counts[c] = total_counts[c] - left_counts[c];
            double g = parent -
                       (double(n_left) / n) * gini(left_counts, n_left) -
                       (double(n - n_left) / n) * gini(right_counts, n - n_left);
            if (g > best.gain + 1e-12) {
                best.gain = g;
                best.feature = f;
                best.threshold = 0.5 * (vals[k].first + vals[k + 1].first);
            }
        }
    }
    return best;
}

inline int grow(DecisionTree& tree, const DenseData& data,
                const std::vector<int>& y, std::vector<std::size_t> idx,
                const TreeParams& p, int depth, rng::Engine* feature_rng) {
    std::vector<int> counts(tree.n_classes, 0);
    for (std::size_t i : idx) ++counts[y[i]];

    TreeNode node;
    node.label = majority(counts);
    const int me = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    const bool pure = std::count(counts.begin(), counts.end(), 0) ==
                      tree.n_classes - 1;
    if (pure || (p.max_depth > 0 && depth >= p.max_depth) ||
        static_cast<int>(idx.size()) < 2 * p.min_samples_leaf)
        return me;

    std::vector<int> features;
    const int d = static_cast<int>(data.d);
    if (p.max_features > 0 && p.max_features < d && feature_rng) {
        std::vector<int> all(d);
        for (int j = 0; j < d; ++j) all[j] = j;
        rng::shuffle(all, *feature_rng);
        features.assign(all.begin(), all.begin() + p.max_features);
        std::sort(features.begin(), features.end());
    } else {
        features.resize(d);
        for (int j = 0; j < d; ++j) features[j] = j;
    }

    auto split = best_split(data, y, idx, features, tree.n_classes,
                            p.min_samples_leaf);
    if (split.feature < 0) return me;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
        if (data.columns[split.feature][i] < split.threshold)
            left.push_back(i);
        else
            right.push_back(i);
    }
    if (left.empty() || right.empty()) return me;

    idx.clear();
    idx.shrink_to_fit();
    tree.nodes[me].feature = split.feature;
    tree.nodes[me].threshold = split.threshold;
    tree.nodes[me].left =
        grow(tree, data, y, std::move(left), p, depth + 1, feature_rng);
    tree.nodes[me].right =
        grow(tree, data, y, std::move(right), p, depth + 1, feature_rng);
    return me;
}

}  // namespace detail

inline DecisionTree train_tree(const DenseData& data, const std::vector<int>& y,
                               int n_classes, const TreeParams& params,
                               rng::Engine* feature_rng = nullptr) {
    if (data.n == 0) throw std::runtime_error("train_tree: no samples");
    DecisionTree t;
    t.n_classes = n_classes;
    std::vector<std::size_t> idx(data.n);
    for (std::size_t i = 0; i < data.n; ++i) idx[i] = i;
    detail::grow(t, data, y, std::move(idx), params, 0, feature_rng);
    return t;
}

struct ForestModel {
    std::vector<DecisionTree> trees;
    int n_classes = 0;

    int predict(const SparseVec& x) const {
        std::vector<int> votes(n_classes, 0);
        for (const auto& t : trees) ++votes[t.predict(x)];
        return detail::majority(votes);
    }
};

struct ForestParams {
    int n_estimators = 100;
    int max_depth = 0;
    int min_samples_leaf = 1;
};

inline ForestModel train_forest(const std::vector<SparseVec>& X,
                                const std::vector<int>& y, int n_classes,
                                std::size_t dim, const ForestParams& params,
                                std::uint64_t seed,
                                const std::vector<std::string>& class_names = {}) {
    detail::check_classes_present(y, n_classes, class_names);
    ForestModel m;
    m.n_classes = n_classes;
    auto data = DenseData::from_sparse(X, dim);
    const int max_features =
        std::max(1, static_cast<int>(std::sqrt(double(dim))));
    for (int t = 0; t < params.n_estimators; ++t) {
        auto eng = rng::derive(seed, 1000 + t);
        std::vector<std::size_t> boot(data.n);
        for (std::size_t i = 0; i < data.n; ++i)
            boot[i] = rng::uniform_index(eng, data.n);
        std::sort(boot.begin(), boot.end());

        // materialize the bootstrap sample
        DenseData bd;
        bd.n = boot.size();
        bd.d = data.d;
        bd.columns.assign(data.d, std::vector<double>(bd.n));
        std::vector<int> by(bd.n);
        for (std::size_t k = 0; k < boot.size(); ++k) {
            by[k] = y[boot[k]];
            for (std::size_t j = 0; j < data.d; ++j)
                bd.columns[j][k] = data.columns[j][boot[k]];
        }
        TreeParams tp;
        tp.max_depth = params.max_depth;
        tp.min_samples_leaf = params.min_samples_leaf;
        tp.max_features = max_features;
        DecisionTree tree;
        tree.n_classes = n_classes;
        std::vector<std::size_t> idx(bd.n);
        for (std::size_t i = 0; i < bd.n; ++i) idx[i] = i;
        detail::grow(tree, bd, by, std::move(idx), tp, 0, &eng);
        m.trees.push_back(std::move(tree));
    }
    return m;
}

}  // namespace parksent::classify
