#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "parksent/model_select.hpp"
#include "parksent/rng.hpp"

using namespace parksent;
using namespace parksent::regress;

namespace {

// independent auxiliary-regression R^2 via normal equations
double oracle_r2(const Eigen::MatrixXd& x, int target,
                 const std::vector<int>& others) {
    Eigen::MatrixXd d(x.rows(), others.size() + 1);
    d.col(0).setOnes();
    for (std::size_t j = 0; j < others.size(); ++j)
        d.col(j + 1) = x.col(others[j]);
    Eigen::VectorXd y = x.col(target);
    Eigen::VectorXd beta =
        (d.transpose() * d).ldlt().solve(d.transpose() * y);
    double rss = (y - d * beta).squaredNorm();
    double tss = (y.array() - y.mean()).square().sum();
    return 1.0 - rss / tss;
}

Eigen::MatrixXd orthonormal_design(int n, int p, std::uint64_t seed) {
    Eigen::MatrixXd m(n, p);
    auto eng = rng::derive(seed, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = rng::normal(eng);
    // center then orthonormalize so the intercept stays out of play
    for (int j = 0; j < p; ++j) m.col(j).array() -= m.col(j).mean();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    for (int j = 0; j < p; ++j) q.col(j).array() -= q.col(j).mean();
    return q;
}

}  // namespace

TEST_CASE("vif: orthonormal design keeps everything at VIF 1", "[regress]") {
    auto x = orthonormal_design(50, 4, 11);
    auto report = vif_filter(x, {"a", "b", "c", "d"}, 5.0);
    CHECK(report.excluded.empty());
    REQUIRE(report.kept.size() == 4);
    for (const auto& e : report.kept)
        CHECK(e.vif == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("vif: duplicated column drops the later label with infinite flag",
          "[regress]") {
    auto eng = rng::derive(3, 1);
    Eigen::MatrixXd x(40, 3);
    for (int i = 0; i < 40; ++i) {
        x(i, 0) = rng::normal(eng);
        x(i, 2) = rng::normal(eng);
    }
    x.col(1) = x.col(0);  // exact copy
    auto report = vif_filter(x, {"first", "copy", "noise"}, 5.0);
    REQUIRE(report.excluded.size() == 1);
    CHECK(report.excluded[0].name == "copy");
    CHECK(report.excluded[0].infinite);
    REQUIRE(report.kept.size() == 2);
    CHECK(report.kept[0].name == "first");
}

TEST_CASE("vif: values match 1/(1 - R^2) from the oracle regression",
          "[regress]") {
    auto eng = rng::derive(9, 2);
    Eigen::MatrixXd x(60, 3);
    for (int i = 0; i < 60; ++i) {
        x(i, 0) = rng::normal(eng);
        x(i, 1) = rng::normal(eng);
        x(i, 2) = 0.8 * x(i, 0) + 0.4 * x(i, 1) + 0.5 * rng::normal(eng);
    }
    auto report = vif_filter(x, {"x1", "x2", "x3"}, 1e9);  // keep all
    REQUIRE(report.kept.size() == 3);
    std::vector<std::vector<int>> others = {{1, 2}, {0, 2}, {0, 1}};
    for (int j = 0; j < 3; ++j) {
        double r2 = oracle_r2(x, j, others[j]);
        CHECK(report.kept[j].vif == Catch::Approx(1.0 / (1.0 - r2)).margin(1e-6));
    }
}

TEST_CASE("vif: selection is independent of row order", "[regress]") {
    auto eng = rng::derive(21, 0);
    Eigen::MatrixXd x(50, 4);
    for (int i = 0; i < 50; ++i) {
        x(i, 0) = rng::normal(eng);
        x(i, 1) = rng::normal(eng);
        x(i, 2) = 0.95 * x(i, 0) + 0.1 * rng::normal(eng);
        x(i, 3) = rng::normal(eng);
    }
    auto base = vif_filter(x, {"a", "b", "c", "d"}, 5.0);

    std::vector<int> order(50);
    for (int i = 0; i < 50; ++i) order[i] = i;
    rng::shuffle(order, eng);
    Eigen::MatrixXd shuffled(50, 4);
    for (int i = 0; i < 50; ++i) shuffled.row(i) = x.row(order[i]);
    auto again = vif_filter(shuffled, {"a", "b", "c", "d"}, 5.0);

    REQUIRE(base.kept_cols == again.kept_cols);
    REQUIRE(base.excluded.size() == again.excluded.size());
    for (std::size_t i = 0; i < base.excluded.size(); ++i)
        CHECK(base.excluded[i].name == again.excluded[i].name);
}

TEST_CASE("stepwise backward: noise column dropped when y = x1", "[regress]") {
    // AIC by hand: with y = x1 exactly both candidate fits are perfect, so
    // the 2k term decides. k({x1}) = 2 < k({x1, noise}) = 3.
    auto eng = rng::derive(31, 3);
    Eigen::MatrixXd x(30, 2);
    for (int i = 0; i < 30; ++i) {
        x(i, 0) = rng::normal(eng);
        x(i, 1) = rng::normal(eng);
    }
    Eigen::VectorXd y = x.col(0);
    auto res = stepwise_aic(x, y, {"x1", "noise"});
    REQUIRE(res.selected.size() == 1);
    CHECK(res.selected[0] == 0);
    REQUIRE(res.trace.size() >= 2);
    CHECK(res.trace[1].action == "drop");
    CHECK(res.trace[1].variable == "noise");
}

TEST_CASE("stepwise: empty candidate set keeps the intercept-only model",
          "[regress]") {
    Eigen::MatrixXd x(10, 0);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) y(i) = i;
    auto res = stepwise_aic(x, y, {});
    CHECK(res.selected.empty());
    REQUIRE(res.trace.size() == 1);
    CHECK(res.trace[0].action == "start");
}

TEST_CASE("stepwise: trace AIC strictly decreases", "[regress]") {
    auto eng = rng::derive(77, 4);
    Eigen::MatrixXd x(80, 6);
    for (int i = 0; i < 80; ++i)
        for (int j = 0; j < 6; ++j) x(i, j) = rng::normal(eng);
    Eigen::VectorXd y(80);
    for (int i = 0; i < 80; ++i)
        y(i) = 1.5 * x(i, 0) - 0.7 * x(i, 2) + 0.1 * rng::normal(eng);
    for (auto dir : {StepDirection::Backward, StepDirection::Forward}) {
        auto res = stepwise_aic(x, y, {"a", "b", "c", "d", "e", "f"}, dir);
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            CHECK(res.trace[i].aic < res.trace[i - 1].aic);
        // both directions find the two signal variables
        CHECK(std::find(res.selected.begin(), res.selected.end(), 0) !=
              res.selected.end());
        CHECK(std::find(res.selected.begin(), res.selected.end(), 2) !=
              res.selected.end());
    }
}

TEST_CASE("stepwise: AIC values match the definition", "[regress]") {
    auto eng = rng::derive(13, 5);
    Eigen::MatrixXd x(25, 2);
    for (int i = 0; i < 25; ++i) {
        x(i, 0) = rng::normal(eng);
        x(i, 1) = rng::normal(eng);
    }
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i) y(i) = 2.0 * x(i, 0) + 0.3 * rng::normal(eng);

    // independent recomputation of the start AIC
    Eigen::MatrixXd d(25, 3);
    d.col(0).setOnes();
    d.col(1) = x.col(0);
    d.col(2) = x.col(1);
    Eigen::VectorXd beta = (d.transpose() * d).ldlt().solve(d.transpose() * y);
    double rss = (y - d * beta).squaredNorm();
    double expect = 25.0 * std::log(rss / 25.0) + 2.0 * 3.0;

    auto res = stepwise_aic(x, y, {"x1", "x2"});
    CHECK(res.trace[0].aic == Catch::Approx(expect).margin(1e-9));
}
