#pragma once

// Variable screening: iterative VIF filtering and greedy stepwise AIC on
// linear fits. AIC = n*ln(RSS/n) + 2k with k counting estimated
// coefficients (intercept + selected variables).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace parksent::regress {

struct OlsFit {
    Eigen::VectorXd beta;  // intercept first
    double rss = 0.0;
};

// least squares of y on [1 | X(:, cols)]
inline OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const std::vector<int>& cols) {
    const auto n = x.rows();
    Eigen::MatrixXd design(n, cols.size() + 1);
    design.col(0).setOnes();
    for (std::size_t j = 0; j < cols.size(); ++j)
        design.col(j + 1) = x.col(cols[j]);
    OlsFit fit;
    fit.beta = design.colPivHouseholderQr().solve(y);
    fit.rss = (y - design * fit.beta).squaredNorm();
    return fit;
}

struct VifEntry {
    std::string name;
    double vif = 1.0;
    bool infinite = false;
};

struct VifReport {
    std::vector<VifEntry> kept;      // final VIFs of surviving variables
    std::vector<VifEntry> excluded;  // drop order, VIF at drop time
    std::vector<int> kept_cols;      // column indices into the input matrix
};

namespace detail {

// R^2 of column j regressed on the other columns (with intercept)
inline double aux_r2(const Eigen::MatrixXd& x, const std::vector<int>& cols,
                     std::size_t j) {
    std::vector<int> others;
    for (std::size_t m = 0; m < cols.size(); ++m)
        if (m != j) others.push_back(cols[m]);
    Eigen::VectorXd target = x.col(cols[j]);
    const double tss = (target.array() - target.mean()).square().sum();
    if (tss <= 0.0) return 1.0;  // constant column is trivially explained
    auto fit = ols(x, target, others);
    double r2 = 1.0 - fit.rss / tss;
    return std::clamp(r2, 0.0, 1.0);
}

}  // namespace detail

inline VifReport vif_filter(const Eigen::MatrixXd& x,
                            const std::vector<std::string>& names,
                            double threshold = 5.0) {
    if (x.cols() != static_cast<long>(names.size()))
        throw std::invalid_argument("vif_filter: name/column mismatch");
    if (x.rows() <= x.cols())
        throw std::invalid_argument("vif_filter: need more rows than columns");

    VifReport report;
    std::vector<int> cols(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) cols[j] = static_cast<int>(j);

    constexpr double kInfR2 = 1.0 - 1e-10;
    while (cols.size() > 1) {
        std::vector<double> vifs(cols.size());
        std::vector<bool> inf(cols.size(), false);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double r2 = detail::aux_r2(x, cols, j);
            if (r2 >= kInfR2) {
                vifs[j] = std::numeric_limits<double>::infinity();
                inf[j] = true;
            } else {
                vifs[j] = 1.0 / (1.0 - r2);
            }
        }
        // worst first; among equals (e.g. several infinite) drop the
        // later-labeled column
        std::size_t worst = 0;
        for (std::size_t j = 1; j < cols.size(); ++j)
            if (vifs[j] > vifs[worst] ||
                (vifs[j] == vifs[worst] && cols[j] > cols[worst]))
                worst = j;
        if (!(vifs[worst] > threshold)) {
            for (std::size_t j = 0; j < cols.size(); ++j)
                report.kept.push_back({names[cols[j]], vifs[j], inf[j]});
            report.kept_cols = cols;
            return report;
        }
        report.excluded.push_back({names[cols[worst]], vifs[worst], inf[worst]});
        cols.erase(cols.begin() + worst);
    }
    for (int c : cols) {
        report.kept.push_back({names[c], 1.0, false});
        report.kept_cols.push_back(c);
    }
    return report;
}

// Gaussian-likelihood AIC on a linear fit of y ~ 1 + X(:, cols)
inline double gaussian_aic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const std::vector<int>& cols) {
    const double n = double(y.size());
    double rss = ols(x, y, cols).rss;
    if (rss < 1e-300) rss = 1e-300;
    const double k = double(cols.size()) + 1.0;  // + intercept
    return n * std::log(rss / n) + 2.0 * k;
}

enum class StepDirection { Backward, Forward };

struct StepwiseStep {
    std::string action;    // "start", "drop", "add"
    std::string variable;  // empty for "start"
    double aic = 0.0;
};

struct StepwiseResult {
    std::vector<int> selected;          // column indices, input order
    std::vector<StepwiseStep> trace;    // strictly decreasing AIC after start
};

inline StepwiseResult stepwise_aic(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y,
                                   const std::vector<std::string>& names,
                                   StepDirection direction
                                   = StepDirection::Backward) {
    if (x.cols() != static_cast<long>(names.size()))
        throw std::invalid_argument("stepwise_aic: name/column mismatch");
    StepwiseResult res;
    std::vector<int> current;
    if (direction == StepDirection::Backward)
        for (int j = 0; j < x.cols(); ++j) current.push_back(j);

    double aic = gaussian_aic(x, y, current);
    res.trace.push_back({"start", "", aic});

    while (true) {
        double best_aic = aic;
        int best_idx = -1;
        if (direction == StepDirection::Backward) {
            for (std::size_t j = 0; j < current.size(); ++j) {
                std::vector<int> trial = current;
                trial.erase(trial.begin() + j);
                double a = gaussian_aic(x, y, trial);
                if (a < best_aic - 1e-12) {
                    best_aic = a;
                    best_idx = static_cast<int>(j);
                }
            }
            if (best_idx < 0) break;
            res.trace.push_back({"drop", names[current[best_idx]], best_aic});
            current.erase(current.begin() + best_idx);
        } else {
            for (int c = 0; c < x.cols(); ++c) {
                if (std::find(current.begin(), current.end(), c) != current.end())
                    continue;
                std::vector<int> trial = current;
                trial.push_back(c);
                double a = gaussian_aic(x, y, trial);
                if (a < best_aic - 1e-12) {
                    best_aic = a;
                    best_idx = c;
                }
            }
            if (best_idx < 0) break;
            res.trace.push_back({"add", names[best_idx], best_aic});
            current.push_back(best_idx);
        }
        aic = best_aic;
    }
    std::sort(current.begin(), current.end());
    res.selected = current;
    return res;
}

}  // namespace parksent::regress
