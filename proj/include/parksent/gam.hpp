#pragma once

// Penalized least squares with GCV-selected smoothing parameters.
//
//   minimize ||y - X b||^2 + sum_b lambda_b * b' S_b b
//
// Per-block effective degrees of freedom come from the influence matrix:
// with A = X'X + sum lambda_b S_b and F = A^{-1} X'X, unpenalized columns
// have F_jj = 1 exactly, and block edf = d_b - lambda_b * tr(A^{-1} S_b)
// restricted to the block. GCV(lambda) = n * RSS / (n - edf_total)^2 is
// minimized over a log-scale grid followed by coordinate golden-section
// refinement. Linear-term standard errors use the penalized covariance
// sigma^2 * A^{-1}.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "parksent/design.hpp"
#include "parksent/stats.hpp"

namespace parksent::regress {

struct GamOptions {
    std::optional<std::vector<double>> fixed_lambdas;  // bypass GCV
    double grid_log10_lo = -4.0;
    double grid_log10_hi = 8.0;
    double grid_log10_step = 2.0;
    int refine_sweeps = 3;
    int refine_evals = 24;
    double tol = 1e-10;
};

struct GamTerm {
    std::string label;
    double coefficient = 0.0;
    double std_error = 0.0;
    double p_value = 1.0;
};

struct GamFit {
    std::vector<GamTerm> linear;       // intercept, indicators, covariates
    std::vector<double> lambdas;       // per block
    std::vector<double> block_edf;     // per block
    std::vector<std::string> block_names;
    double edf_total = 0.0;
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    double rss = 0.0;
    double gcv = 0.0;
    std::size_t n = 0;
    bool gcv_converged = true;
    Eigen::VectorXd coefficients;      // full vector
    Eigen::VectorXd fitted;
};

inline std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

namespace detail {

struct PenalizedSolve {
    Eigen::VectorXd beta;
    double rss = 0.0;
    double edf_total = 0.0;
    std::vector<double> block_edf;
    double gcv = std::numeric_limits<double>::infinity();
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

inline PenalizedSolve solve_penalized(const DesignMatrix& d,
                                      const std::vector<double>& lambdas) {
    const std::size_t n = d.x.rows();
    const int p = static_cast<int>(d.x.cols());
    Eigen::MatrixXd a = d.x.transpose() * d.x;
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
        const auto& blk = d.blocks[b];
        a.block(blk.start, blk.start, blk.size, blk.size) +=
            lambdas[b] * blk.penalty;
    }
    PenalizedSolve s;
    s.ldlt.compute(a);
    s.beta = s.ldlt.solve(d.x.transpose() * d.y);
    Eigen::VectorXd resid = d.y - d.x * s.beta;
    s.rss = resid.squaredNorm();

    // edf per block: d_b - lambda_b * tr([A^{-1} S_b] over block rows)
    s.edf_total = double(d.linear_cols.size());
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
        const auto& blk = d.blocks[b];
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(p, blk.size);
        rhs.block(blk.start, 0, blk.size, blk.size) = blk.penalty;
        Eigen::MatrixXd z = s.ldlt.solve(rhs);
        double tr = 0.0;
        for (int j = 0; j < blk.size; ++j) tr += z(blk.start + j, j);
        double edf = double(blk.size) - lambdas[b] * tr;
        if (edf < 0.0) edf = 0.0;
        if (edf > double(blk.size)) edf = double(blk.size);
        s.block_edf.push_back(edf);
        s.edf_total += edf;
    }
    const double denom = double(n) - s.edf_total;
    if (denom > 0.0) s.gcv = double(n) * s.rss / (denom * denom);
    return s;
}

}  // namespace detail

inline GamFit fit_gam(const DesignMatrix& d, const GamOptions& opt = {}) {
    const std::size_t n = d.x.rows();
    const std::size_t n_blocks = d.blocks.size();
    if (!d.y.allFinite())
        throw std::invalid_argument("fit_gam: non-finite response");

    std::vector<double> lambdas(n_blocks, 0.0);
    bool converged = true;

    if (opt.fixed_lambdas) {
        if (opt.fixed_lambdas->size() != n_blocks)
            throw std::invalid_argument("fit_gam: one lambda per block required");
        lambdas = *opt.fixed_lambdas;
    } else if (n_blocks > 0) {
        // coarse grid over log10(lambda) per block
        std::vector<double> grid;
        for (double g = opt.grid_log10_lo; g <= opt.grid_log10_hi + 1e-9;
             g += opt.grid_log10_step)
            grid.push_back(g);
        std::vector<std::size_t> pick(n_blocks, 0);
        double best_gcv = std::numeric_limits<double>::infinity();
        std::vector<double> best(n_blocks, 1.0);
        // full factorial enumeration via odometer
        while (true) {
            std::vector<double> trial(n_blocks);
            for (std::size_t b = 0; b < n_blocks; ++b)
                trial[b] = std::pow(10.0, grid[pick[b]]);
            double gcv = detail::solve_penalized(d, trial).gcv;
            if (gcv < best_gcv) {
                best_gcv = gcv;
                best = trial;
            }
            std::size_t b = 0;
            while (b < n_blocks && ++pick[b] == grid.size()) {
                pick[b] = 0;
                ++b;
            }
            if (b == n_blocks) break;
        }

        // coordinate golden-section refinement on the log scale
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        converged = false;
        for (int sweep = 0; sweep < opt.refine_sweeps && !converged; ++sweep) {
            double before = best_gcv;
            for (std::size_t b = 0; b < n_blocks; ++b) {
                double lo = std::log10(best[b]) - opt.grid_log10_step;
                double hi = std::log10(best[b]) + opt.grid_log10_step;
                auto eval = [&](double lg) {
                    std::vector<double> trial = best;
                    trial[b] = std::pow(10.0, lg);
                    return detail::solve_penalized(d, trial).gcv;
                };
                double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
                double f1 = eval(x1), f2 = eval(x2);
                for (int it = 0; it < opt.refine_evals; ++it) {
                    if (f1 < f2) {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - gr * (hi - lo);
                        f1 = eval(x1);
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + gr * (hi - lo);
                        f2 = eval(x2);
                    }
                }
                const double lg = f1 < f2 ? x1 : x2;
                const double val = std::min(f1, f2);
                if (val < best_gcv) {
                    best_gcv = val;
                    best[b] = std::pow(10.0, lg);
                }
            }
            if (before - best_gcv <= opt.tol * std::max(1.0, before))
                converged = true;
        }
        lambdas = best;
    }

    auto s = detail::solve_penalized(d, lambdas);

    GamFit fit;
    fit.n = n;
    fit.lambdas = lambdas;
    fit.block_edf = s.block_edf;
    for (const auto& blk : d.blocks) fit.block_names.push_back(blk.name);
    fit.edf_total = s.edf_total;
    fit.rss = s.rss;
    fit.gcv = s.gcv;
    fit.gcv_converged = converged;
    fit.coefficients = s.beta;
    fit.fitted = d.x * s.beta;

    const double tss = (d.y.array() - d.y.mean()).square().sum();
    fit.r2 = tss > 0.0 ? 1.0 - s.rss / tss : 0.0;
    const double dof = double(n) - s.edf_total;
    fit.adjusted_r2 =
        dof > 1.0 ? 1.0 - (1.0 - fit.r2) * double(n - 1) / dof : fit.r2;

    // linear-term inference from the penalized covariance sigma^2 * A^{-1}
    const double sigma2 = dof > 0.0 ? s.rss / dof : 0.0;
    const int p = static_cast<int>(d.x.cols());
    Eigen::MatrixXd ainv = s.ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    for (int j : d.linear_cols) {
        GamTerm t;
        t.label = d.col_labels[j];
        t.coefficient = s.beta(j);
        t.std_error = std::sqrt(std::max(0.0, sigma2 * ainv(j, j)));
        t.p_value = t.std_error > 0.0
                        ? stats::normal_two_sided(t.coefficient / t.std_error)
                        : 0.0;
        fit.linear.push_back(std::move(t));
    }
    return fit;
}

}  // namespace parksent::regress
