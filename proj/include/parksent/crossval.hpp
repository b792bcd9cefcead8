#pragma once

// Stratified K-fold cross-validation and exhaustive grid search.
//
// Folds preserve per-class proportions within one item: each class's
// examples are shuffled (seed-derived) and dealt round-robin, so the folds
// partition the data exactly. Classes with fewer members than K get a
// relaxed-stratification warning. The winning grid point maximizes mean
// validation accuracy; ties break toward the lexicographically smaller
// hyperparameter tuple (numeric-aware value comparison).

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "parksent/classifier.hpp"
#include "parksent/rng.hpp"

namespace parksent::classify {

// fold id per example, in input order
inline std::vector<int> stratified_folds(const std::vector<AttitudeLabel>& y,
                                         int k, std::uint64_t seed,
                                         std::vector<std::string>* warnings
                                         = nullptr) {
    if (k < 2) throw std::invalid_argument("stratified_folds: K must be >= 2");
    if (static_cast<int>(y.size()) < k)
        throw std::invalid_argument("stratified_folds: fewer examples than folds");
    std::vector<int> fold(y.size(), -1);
    for (int cls = 0; cls < kNumLabels; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (static_cast<int>(y[i]) == cls) idx.push_back(i);
        if (idx.empty()) continue;
        if (static_cast<int>(idx.size()) < k && warnings)
            warnings->push_back(
                "class " + std::string(to_string(static_cast<AttitudeLabel>(cls))) +
                " has fewer members (" + std::to_string(idx.size()) +
                ") than folds; stratification relaxed");
        auto eng = rng::derive(seed, 100 + cls);
        rng::shuffle(idx, eng);
        for (std::size_t j = 0; j < idx.size(); ++j)
            fold[idx[j]] = static_cast<int>(j % k);
    }
    return fold;
}

struct GridSpec {
    ClassifierKind kind = ClassifierKind::Logistic;
    // parameter name -> candidate values, in file order
    std::vector<std::pair<std::string, std::vector<std::string>>> params;
};

inline GridSpec load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path);
    nlohmann::json j;
    in >> j;
    GridSpec g;
    g.kind = parse_kind(j.at("kind").get<std::string>());
    for (auto& [name, vals] : j.at("grid").items()) {
        std::vector<std::string> vs;
        for (const auto& v : vals) {
            if (v.is_string()) vs.push_back(v.get<std::string>());
            else vs.push_back(csvio::fmt_sig(v.get<double>()));
        }
        g.params.emplace_back(name, std::move(vs));
    }
    // canonical parameter order for tuple comparisons
    std::sort(g.params.begin(), g.params.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return g;
}

namespace detail {

inline std::vector<HyperParams> expand_grid(const GridSpec& g) {
    std::vector<HyperParams> out{{}};
    for (const auto& [name, values] : g.params) {
        std::vector<HyperParams> next;
        for (const auto& base : out)
            for (const auto& v : values) {
                HyperParams hp = base;
                hp[name] = v;
                next.push_back(std::move(hp));
            }
        out = std::move(next);
    }
    return out;
}

// numeric-aware lexicographic comparison over sorted parameter names
inline bool tuple_less(const HyperParams& a, const HyperParams& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first;
        auto na = csvio::to_double(ia->second);
        auto nb = csvio::to_double(ib->second);
        if (na && nb) {
            if (*na != *nb) return *na < *nb;
        } else if (ia->second != ib->second) {
            return ia->second < ib->second;
        }
    }
    return a.size() < b.size();
}

}  // namespace detail

struct CvCell {
    HyperParams params;
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
};

struct CvReport {
    std::vector<CvCell> cells;           // grid order
    HyperParams best;
    double best_mean_accuracy = 0.0;
    std::vector<std::string> warnings;
    int k = 0;
};

inline CvReport cross_validate(const GridSpec& grid,
                               const std::vector<LabeledExample>& examples,
                               int k, std::uint64_t seed, int min_df = 2) {
    if (static_cast<int>(examples.size()) < k)
        throw std::invalid_argument("cross_validate: |examples| < K");
    CvReport report;
    report.k = k;

    std::vector<AttitudeLabel> y(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) y[i] = examples[i].label;
    auto fold = stratified_folds(y, k, seed, &report.warnings);

    auto points = detail::expand_grid(grid);
    for (const auto& hp : points) {
        CvCell cell;
        cell.params = hp;
        for (int f = 0; f < k; ++f) {
            std::vector<std::string> train_texts, val_texts;
            std::vector<AttitudeLabel> train_y, val_y;
            for (std::size_t i = 0; i < examples.size(); ++i) {
                if (fold[i] == f) {
                    val_texts.push_back(examples[i].text);
                    val_y.push_back(examples[i].label);
                } else {
                    train_texts.push_back(examples[i].text);
                    train_y.push_back(examples[i].label);
                }
            }
            if (val_texts.empty()) {
                cell.fold_accuracy.push_back(0.0);
                continue;
            }
            auto model = train_on_texts(grid.kind, train_texts, train_y, hp,
                                        seed, min_df);
            auto pred = predict(model, val_texts);
            long correct = 0;
            for (std::size_t i = 0; i < val_y.size(); ++i)
                if (pred[i] == val_y[i]) ++correct;
            cell.fold_accuracy.push_back(double(correct) / double(val_y.size()));
        }
        double sum = 0.0;
        for (double a : cell.fold_accuracy) sum += a;
        cell.mean_accuracy = sum / double(cell.fold_accuracy.size());
        report.cells.push_back(std::move(cell));
    }

    const CvCell* best = nullptr;
    for (const auto& c : report.cells) {
        if (!best || c.mean_accuracy > best->mean_accuracy + 1e-15 ||
            (std::abs(c.mean_accuracy - best->mean_accuracy) <= 1e-15 &&
             detail::tuple_less(c.params, best->params)))
            best = &c;
    }
    report.best = best->params;
    report.best_mean_accuracy = best->mean_accuracy;
    return report;
}

}  // namespace parksent::classify
