#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "parksent/metrics.hpp"
#include "parksent/rng.hpp"

using namespace parksent;
using namespace parksent::classify;

namespace {
constexpr auto P = AttitudeLabel::Positive;
constexpr auto N = AttitudeLabel::Neutral;
constexpr auto G = AttitudeLabel::Negative;
constexpr auto U = AttitudeLabel::Unrelated;
}  // namespace

TEST_CASE("metrics: perfect predictor", "[classify]") {
    std::vector<AttitudeLabel> t = {P, N, G, U, P, G};
    auto r = evaluate(t, t);
    CHECK(r.accuracy == 1.0);
    for (int i = 0; i < kNumLabels; ++i)
        for (int j = 0; j < kNumLabels; ++j)
            if (i != j) CHECK(r.confusion[i][j] == 0);
}

TEST_CASE("metrics: constant predictor on balanced 4-class set", "[classify]") {
    std::vector<AttitudeLabel> truth = {P, P, N, N, G, G, U, U};
    std::vector<AttitudeLabel> pred(truth.size(), P);
    auto r = evaluate(truth, pred);
    CHECK(r.accuracy == Catch::Approx(0.25));
    CHECK(r.f1[static_cast<int>(N)] == 0.0);  // precision and recall both 0
}

TEST_CASE("metrics: hand-computed 10-example confusion case", "[classify]") {
    // truth:     P P P P N N G G G U
    // predicted: P P N G N G G G P U
    // confusion (rows true, cols pred):
    //   P: P=2 N=1 G=1 U=0
    //   N: N=1 G=1
    //   G: G=2 P=1
    //   U: U=1
    // accuracy = 6/10
    // precision(P)=2/3 recall(P)=2/4 f1(P)=2*(2/3)(1/2)/(2/3+1/2)=4/7
    // precision(N)=1/2 recall(N)=1/2 f1(N)=1/2
    // precision(G)=2/4 recall(G)=2/3 f1(G)=4/7
    // precision(U)=1   recall(U)=1   f1(U)=1
    std::vector<AttitudeLabel> truth = {P, P, P, P, N, N, G, G, G, U};
    std::vector<AttitudeLabel> pred = {P, P, N, G, N, G, G, G, P, U};
    auto r = evaluate(truth, pred);
    CHECK(r.accuracy == Catch::Approx(0.6));
    CHECK(r.precision[static_cast<int>(P)] == Catch::Approx(2.0 / 3.0));
    CHECK(r.recall[static_cast<int>(P)] == Catch::Approx(0.5));
    CHECK(r.f1[static_cast<int>(P)] == Catch::Approx(4.0 / 7.0));
    CHECK(r.precision[static_cast<int>(N)] == Catch::Approx(0.5));
    CHECK(r.f1[static_cast<int>(N)] == Catch::Approx(0.5));
    CHECK(r.precision[static_cast<int>(G)] == Catch::Approx(0.5));
    CHECK(r.recall[static_cast<int>(G)] == Catch::Approx(2.0 / 3.0));
    CHECK(r.f1[static_cast<int>(G)] == Catch::Approx(4.0 / 7.0));
    CHECK(r.f1[static_cast<int>(U)] == Catch::Approx(1.0));
    CHECK(r.confusion[static_cast<int>(P)][static_cast<int>(P)] == 2);
    CHECK(r.confusion[static_cast<int>(G)][static_cast<int>(P)] == 1);
}

TEST_CASE("metrics: accuracy equals trace over total", "[classify]") {
    std::vector<AttitudeLabel> truth = {P, N, G, U, P, N, G, U, P};
    std::vector<AttitudeLabel> pred = {P, G, G, U, N, N, P, U, P};
    auto r = evaluate(truth, pred);
    long trace = 0, total = 0;
    for (int i = 0; i < kNumLabels; ++i)
        for (int j = 0; j < kNumLabels; ++j) {
            total += r.confusion[i][j];
            if (i == j) trace += r.confusion[i][j];
        }
    CHECK(total == static_cast<long>(truth.size()));
    CHECK(r.accuracy == Catch::Approx(double(trace) / double(total)));
}

TEST_CASE("metrics: per-class F1 invariant under permutation", "[classify]") {
    std::vector<AttitudeLabel> truth = {P, P, N, G, G, U, P, N, G, U, P, G};
    std::vector<AttitudeLabel> pred = {P, N, N, G, P, U, P, G, G, P, N, G};
    auto base = evaluate(truth, pred);

    std::vector<std::size_t> order(truth.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto eng = rng::derive(11, 0);
    for (int rep = 0; rep < 5; ++rep) {
        rng::shuffle(order, eng);
        std::vector<AttitudeLabel> t2, p2;
        for (auto i : order) {
            t2.push_back(truth[i]);
            p2.push_back(pred[i]);
        }
        auto r = evaluate(t2, p2);
        for (int c = 0; c < kNumLabels; ++c)
            CHECK(r.f1[c] == Catch::Approx(base.f1[c]).epsilon(1e-15));
    }
}
