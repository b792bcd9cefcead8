#include <catch2/catch_amalgamated.hpp>

#include "parksent/forest.hpp"

using namespace parksent::classify;

namespace {

SparseVec sv1(double x) {
    SparseVec v;
    v.entries = {{0, x}};
    return v;
}

}  // namespace

TEST_CASE("tree: depth-1 stump reproduces the hand enumeration", "[classify]") {
    // One feature, values {1,2,3,4}, classes {0,0,1,1}. Candidate splits
    // and their Gini gains (parent gini = 0.5):
    //   t=1.5: left {0}, right {0,1,1}      gain = 0.5 - 3/4 * 4/9 = 1/6
    //   t=2.5: left {0,0}, right {1,1}      gain = 0.5              (best)
    //   t=3.5: left {0,0,1}, right {1}      gain = 1/6
    std::vector<SparseVec> X = {sv1(1), sv1(2), sv1(3), sv1(4)};
    std::vector<int> y = {0, 0, 1, 1};
    auto data = DenseData::from_sparse(X, 1);
    TreeParams p;
    p.max_depth = 1;
    auto tree = train_tree(data, y, 2, p);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == Catch::Approx(2.5));
    CHECK(tree.predict(sv1(1)) == 0);
    CHECK(tree.predict(sv1(2)) == 0);
    CHECK(tree.predict(sv1(3)) == 1);
    CHECK(tree.predict(sv1(4)) == 1);
}

TEST_CASE("tree: min_samples_leaf blocks narrow splits", "[classify]") {
    std::vector<SparseVec> X = {sv1(1), sv1(2), sv1(3), sv1(4)};
    std::vector<int> y = {0, 1, 1, 1};
    auto data = DenseData::from_sparse(X, 1);
    TreeParams p;
    p.min_samples_leaf = 2;
    auto tree = train_tree(data, y, 2, p);
    // the only pure split (t=1.5) leaves one sample on the left, so with
    // min_samples_leaf=2 the best legal split is t=2.5
    REQUIRE(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == Catch::Approx(2.5));
}

TEST_CASE("forest: one-tree forest matches the stump on two-valued data",
          "[classify]") {
    // feature values only 0 and 10, so any bootstrap containing both
    // classes yields threshold 5
    std::vector<SparseVec> X;
    std::vector<int> y;
    for (int i = 0; i < 8; ++i) {
        X.push_back(sv1(i < 4 ? 0.0 : 10.0));
        y.push_back(i < 4 ? 0 : 1);
    }
    ForestParams p;
    p.n_estimators = 1;
    p.max_depth = 1;
    auto m = train_forest(X, y, 2, 1, p, /*seed=*/3);
    REQUIRE(m.trees.size() == 1);
    CHECK(m.trees[0].nodes[0].threshold == Catch::Approx(5.0));
    CHECK(m.predict(sv1(0.0)) == 0);
    CHECK(m.predict(sv1(10.0)) == 1);
}

TEST_CASE("forest: same seed, same data, identical predictions", "[classify]") {
    std::vector<SparseVec> X;
    std::vector<int> y;
    auto eng = parksent::rng::derive(99, 0);
    for (int i = 0; i < 60; ++i) {
        SparseVec v;
        v.entries = {{0, parksent::rng::uniform01(eng)},
                     {1, parksent::rng::uniform01(eng)}};
        X.push_back(v);
        y.push_back((v.entries[0].second + v.entries[1].second > 1.0) ? 1 : 0);
    }
    ForestParams p;
    p.n_estimators = 15;
    p.max_depth = 4;
    auto a = train_forest(X, y, 2, 2, p, 1234);
    auto b = train_forest(X, y, 2, 2, p, 1234);
    for (const auto& x : X) CHECK(a.predict(x) == b.predict(x));
}

TEST_CASE("forest: learns a 2d majority rule", "[classify]") {
    std::vector<SparseVec> X;
    std::vector<int> y;
    auto eng = parksent::rng::derive(5, 0);
    for (int i = 0; i < 200; ++i) {
        double a = parksent::rng::uniform01(eng);
        double b = parksent::rng::uniform01(eng);
        SparseVec v;
        v.entries = {{0, a}, {1, b}};
        X.push_back(v);
        y.push_back(a > 0.5 ? 1 : 0);
    }
    ForestParams p;
    p.n_estimators = 30;
    p.max_depth = 3;
    auto m = train_forest(X, y, 2, 2, p, 7);
    int correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (m.predict(X[i]) == y[i]) ++correct;
    CHECK(double(correct) / double(X.size()) > 0.95);
}
