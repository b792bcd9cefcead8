#pragma once

// Design matrix assembly for the penalized regression: intercept,
// optional POI-category indicators, standardized linear covariates, a
// tensor-interaction smooth over (lat, lng) and a ridge-penalized
// group-indicator block per CBSA (random-effect equivalence).
//
// The tensor block excludes main effects by construction: the raw tensor
// products are reparameterized to the range space of the tensor-sum
// second-difference penalty (null-space directions dropped, so every
// smooth direction is penalized and lambda -> infinity recovers plain
// least squares), then residualized against [1, marginal bases], making
// the block exactly orthogonal to the main-effect span.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parksent/bspline.hpp"

namespace parksent::regress {

struct RegressionRow {
    std::string cbg_id;
    std::string cbsa_id;
    double lat = 0.0;
    double lng = 0.0;
    double y = 0.0;
    std::vector<double> covariates;   // aligned with variable names
    std::optional<int> category;      // set when POI type is controlled
};

struct SmoothBlock {
    std::string name;
    int start = 0;             // first column in X
    int size = 0;
    Eigen::MatrixXd penalty;   // size x size, positive definite
};

struct DesignMatrix {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> col_labels;
    std::vector<int> linear_cols;      // intercept, indicators, covariates
    std::vector<SmoothBlock> blocks;   // tensor, group
    std::vector<std::string> group_ids;  // CBSA order of the group block
};

struct DesignOptions {
    int knots = 8;             // marginal basis dimension
    bool spatial_smooth = true;
    bool group_smooth = true;
};

inline DesignMatrix build_design(std::span<const RegressionRow> rows,
                                 const std::vector<std::string>& covariate_names,
                                 const DesignOptions& opt = {}) {
    const std::size_t n = rows.size();
    if (n < 3) throw std::invalid_argument("build_design: too few rows");
    for (const auto& r : rows)
        if (r.covariates.size() != covariate_names.size())
            throw std::invalid_argument("build_design: covariate arity mismatch");

    DesignMatrix d;
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.y(i) = rows[i].y;

    std::vector<Eigen::VectorXd> linear_columns;
    std::vector<std::string> linear_labels;

    linear_columns.push_back(Eigen::VectorXd::Ones(n));
    linear_labels.push_back("(Intercept)");

    // category indicators, reference = lowest category present
    bool has_category = false;
    for (const auto& r : rows) has_category |= r.category.has_value();
    if (has_category) {
        std::map<int, long> present;
        for (const auto& r : rows)
            if (r.category) ++present[*r.category];
        if (present.size() > 1) {
            auto it = present.begin();
            ++it;  // skip the reference level
            for (; it != present.end(); ++it) {
                Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
                for (std::size_t i = 0; i < n; ++i)
                    if (rows[i].category && *rows[i].category == it->first)
                        col(i) = 1.0;
                linear_columns.push_back(col);
                linear_labels.push_back("category:" + std::to_string(it->first));
            }
        }
    }

    // standardized covariates (sample std, mean 0 / variance 1)
    for (std::size_t j = 0; j < covariate_names.size(); ++j) {
        Eigen::VectorXd col(n);
        for (std::size_t i = 0; i < n; ++i) col(i) = rows[i].covariates[j];
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / double(n - 1));
        if (sd <= 0.0)
            throw std::invalid_argument("build_design: constant covariate " +
                                        covariate_names[j]);
        col /= sd;
        linear_columns.push_back(col);
        linear_labels.push_back(covariate_names[j]);
    }

    // tensor-interaction block
    Eigen::MatrixXd tensor;
    Eigen::MatrixXd tensor_penalty;
    Eigen::MatrixXd marginal_lat, marginal_lng;
    if (opt.spatial_smooth) {
        std::vector<double> lat(n), lng(n);
        for (std::size_t i = 0; i < n; ++i) {
            lat[i] = rows[i].lat;
            lng[i] = rows[i].lng;
        }
        auto b1 = BsplineBasis::from_data(lat, opt.knots);
        auto b2 = BsplineBasis::from_data(lng, opt.knots);
        marginal_lat = b1.design(lat);
        marginal_lng = b2.design(lng);
        const int k1 = b1.dim(), k2 = b2.dim();

        Eigen::MatrixXd raw(n, k1 * k2);
        for (int a = 0; a < k1; ++a)
            for (int b = 0; b < k2; ++b)
                raw.col(a * k2 + b) =
                    marginal_lat.col(a).cwiseProduct(marginal_lng.col(b));

        // tensor-sum penalty S1 (x) I + I (x) S2 over the coefficient grid
        Eigen::MatrixXd s1 = b1.difference_penalty();
        Eigen::MatrixXd s2 = b2.difference_penalty();
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k1 * k2, k1 * k2);
        for (int a = 0; a < k1; ++a)
            for (int b = 0; b < k2; ++b)
                for (int a2 = 0; a2 < k1; ++a2)
                    s(a * k2 + b, a2 * k2 + b) += s1(a, a2);
        for (int a = 0; a < k1; ++a)
            for (int b = 0; b < k2; ++b)
                for (int b2 = 0; b2 < k2; ++b2)
                    s(a * k2 + b, a * k2 + b2) += s2(b, b2);

        // reparameterize to the penalty range space
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
        const auto& evals = eig.eigenvalues();  // ascending
        const double cutoff = evals(evals.size() - 1) * 1e-9;
        std::vector<int> keep;
        for (int j = 0; j < evals.size(); ++j)
            if (evals(j) > cutoff) keep.push_back(j);
        tensor.resize(n, keep.size());
        tensor_penalty = Eigen::MatrixXd::Zero(keep.size(), keep.size());
        for (std::size_t m = 0; m < keep.size(); ++m) {
            tensor.col(m) = raw * eig.eigenvectors().col(keep[m]);
            tensor_penalty(m, m) = evals(keep[m]);
        }

        // residualize against [1 | B_lat | B_lng]: main effects excluded
        Eigen::MatrixXd main(n, 1 + k1 + k2);
        main.col(0).setOnes();
        main.block(0, 1, n, k1) = marginal_lat;
        main.block(0, 1 + k1, n, k2) = marginal_lng;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(main);
        tensor -= main * qr.solve(tensor);
    }

    // group-indicator block (CBSA), sorted ids
    Eigen::MatrixXd group;
    if (opt.group_smooth) {
        std::map<std::string, int> ids;
        for (const auto& r : rows) ids.emplace(r.cbsa_id, 0);
        int gi = 0;
        for (auto& [id, idx] : ids) {
            idx = gi++;
            d.group_ids.push_back(id);
        }
        group = Eigen::MatrixXd::Zero(n, ids.size());
        for (std::size_t i = 0; i < n; ++i)
            group(i, ids.at(rows[i].cbsa_id)) = 1.0;
    }

    const int p_linear = static_cast<int>(linear_columns.size());
    const int p_tensor = opt.spatial_smooth ? static_cast<int>(tensor.cols()) : 0;
    const int p_group = opt.group_smooth ? static_cast<int>(group.cols()) : 0;
    d.x.resize(n, p_linear + p_tensor + p_group);
    for (int j = 0; j < p_linear; ++j) {
        d.x.col(j) = linear_columns[j];
        d.col_labels.push_back(linear_labels[j]);
        d.linear_cols.push_back(j);
    }
    if (p_tensor > 0) {
        d.x.block(0, p_linear, n, p_tensor) = tensor;
        SmoothBlock blk;
        blk.name = "ti(Lat,Lng)";
        blk.start = p_linear;
        blk.size = p_tensor;
        blk.penalty = tensor_penalty;
        d.blocks.push_back(std::move(blk));
        for (int j = 0; j < p_tensor; ++j)
            d.col_labels.push_back("ti." + std::to_string(j));
    }
    if (p_group > 0) {
        d.x.block(0, p_linear + p_tensor, n, p_group) = group;
        SmoothBlock blk;
        blk.name = "s(CBSA)";
        blk.start = p_linear + p_tensor;
        blk.size = p_group;
        blk.penalty = Eigen::MatrixXd::Identity(p_group, p_group);
        d.blocks.push_back(std::move(blk));
        for (const auto& id : d.group_ids) d.col_labels.push_back("cbsa." + id);
    }
    return d;
}

}  // namespace parksent::regress
