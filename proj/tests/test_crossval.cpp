#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "parksent/crossval.hpp"

using namespace parksent;
using namespace parksent::classify;

namespace {

const std::string kFixtures = PARKSENT_FIXTURE_DIR;

std::vector<LabeledExample> balanced4(int per_class) {
    std::vector<LabeledExample> out;
    const char* texts[4] = {"plenty easy", "street meter", "tight expensive",
                            "camera mural"};
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < per_class; ++i) {
            LabeledExample e;
            e.text = texts[c];
            e.label = static_cast<AttitudeLabel>(c);
            out.push_back(e);
        }
    return out;
}

}  // namespace

TEST_CASE("folds: partition the data exactly", "[classify]") {
    auto examples = balanced4(7);  // 28 examples
    std::vector<AttitudeLabel> y;
    for (auto& e : examples) y.push_back(e.label);
    auto fold = stratified_folds(y, 5, 42);
    std::vector<int> count(5, 0);
    for (int f : fold) {
        REQUIRE(f >= 0);
        REQUIRE(f < 5);
        ++count[f];
    }
    int total = 0;
    for (int c : count) total += c;
    CHECK(total == 28);
}

TEST_CASE("folds: per-class proportions within one item", "[classify]") {
    auto examples = balanced4(7);
    std::vector<AttitudeLabel> y;
    for (auto& e : examples) y.push_back(e.label);
    auto fold = stratified_folds(y, 3, 9);
    for (int c = 0; c < 4; ++c) {
        std::vector<int> per_fold(3, 0);
        for (std::size_t i = 0; i < y.size(); ++i)
            if (static_cast<int>(y[i]) == c) ++per_fold[fold[i]];
        int lo = *std::min_element(per_fold.begin(), per_fold.end());
        int hi = *std::max_element(per_fold.begin(), per_fold.end());
        CHECK(hi - lo <= 1);
    }
}

TEST_CASE("folds: K=2 on 4 balanced examples holds one per class per fold",
          "[classify]") {
    // two classes, two examples each
    std::vector<AttitudeLabel> y = {AttitudeLabel::Positive,
                                    AttitudeLabel::Positive,
                                    AttitudeLabel::Negative,
                                    AttitudeLabel::Negative};
    auto fold = stratified_folds(y, 2, 5);
    for (int f = 0; f < 2; ++f) {
        int pos = 0, neg = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (fold[i] != f) continue;
            if (y[i] == AttitudeLabel::Positive) ++pos;
            else ++neg;
        }
        CHECK(pos == 1);
        CHECK(neg == 1);
    }
}

TEST_CASE("folds: class smaller than K warns and relaxes", "[classify]") {
    std::vector<AttitudeLabel> y(10, AttitudeLabel::Positive);
    y[0] = AttitudeLabel::Negative;  // one member, K=3
    std::vector<std::string> warnings;
    auto fold = stratified_folds(y, 3, 1, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("negative") != std::string::npos);
    CHECK(fold.size() == y.size());
}

TEST_CASE("grid of one point returns that point", "[classify]") {
    GridSpec g;
    g.kind = ClassifierKind::Logistic;
    g.params = {{"C", {"1"}}, {"max_iter", {"50"}}};
    auto examples = balanced4(6);
    auto report = cross_validate(g, examples, 3, 17, /*min_df=*/1);
    CHECK(report.best.at("C") == "1");
    CHECK(report.best.at("max_iter") == "50");
    CHECK(report.cells.size() == 1);
}

TEST_CASE("grid search on the synthetic 4-class corpus", "[classify]") {
    auto all = load_labeled_csv(kFixtures + std::string("/synthetic4.csv"));
    std::vector<LabeledExample> train;
    for (auto& e : all)
        if (e.is_train) train.push_back(e);
    auto grid = load_grid(kFixtures + std::string("/grids/logistic_small.json"));
    auto report = cross_validate(grid, train, 10, 42);
    INFO("best mean accuracy " << report.best_mean_accuracy);
    CHECK(report.best_mean_accuracy >= 0.95);

    // train the winning config on the train split, evaluate on test
    std::vector<std::string> texts;
    std::vector<AttitudeLabel> y;
    for (auto& e : train) {
        texts.push_back(e.text);
        y.push_back(e.label);
    }
    auto model = train_on_texts(grid.kind, texts, y, report.best, 42);
    std::vector<AttitudeLabel> truth;
    std::vector<std::string> test_texts;
    for (auto& e : all)
        if (!e.is_train) {
            test_texts.push_back(e.text);
            truth.push_back(e.label);
        }
    auto pred = predict(model, test_texts);
    auto metrics = evaluate(truth, pred);
    INFO("test accuracy " << metrics.accuracy);
    CHECK(metrics.accuracy >= 0.95);
}

TEST_CASE("grid ties break toward the smaller tuple", "[classify]") {
    HyperParams a = {{"C", "0.1"}, {"max_iter", "50"}};
    HyperParams b = {{"C", "1"}, {"max_iter", "20"}};
    CHECK(classify::detail::tuple_less(a, b));
    CHECK_FALSE(classify::detail::tuple_less(b, a));
    HyperParams c = {{"C", "1"}, {"max_iter", "20"}};
    CHECK_FALSE(classify::detail::tuple_less(b, c));
    CHECK_FALSE(classify::detail::tuple_less(c, b));
}
