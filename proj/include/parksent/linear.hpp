#pragma once

// Linear classifiers over sparse features, one-vs-rest across classes.
//
// "logistic": L2-penalized logistic regression minimized by full-batch
// gradient descent with a backtracking (Armijo) line search. Objective per
// binary problem: 0.5*||w||^2 + C * sum_i log(1 + exp(-y_i f_i)), bias
// unpenalized. Deterministic; accepted solver names all select this
// optimizer.
//
// "sgd": hinge loss with l2/l1/elasticnet penalty and the fixed schedule
// eta_t = eta0 / (1 + alpha * eta0 * t). Example order is reshuffled each
// epoch from a seed-derived stream.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "parksent/rng.hpp"
#include "parksent/tfidf.hpp"

namespace parksent::classify {

struct LinearModel {
    int n_classes = 0;
    std::size_t dim = 0;
    std::vector<std::vector<double>> weights;  // per class
    std::vector<double> bias;                  // per class

    double decision(int cls, const SparseVec& x) const {
        double f = bias[cls];
        const auto& w = weights[cls];
        for (auto& [i, v] : x.entries) f += w[i] * v;
        return f;
    }

    int predict(const SparseVec& x) const {
        int best = 0;
        double best_f = decision(0, x);
        for (int c = 1; c < n_classes; ++c) {
            double f = decision(c, x);
            if (f > best_f) {
                best_f = f;
                best = c;
            }
        }
        return best;
    }
};

namespace detail {

struct BinaryLogistic {
    // returns (objective, gradient) at w for labels y in {-1,+1}
    static double objective(const std::vector<SparseVec>& X,
                            const std::vector<int>& y, double C,
                            const std::vector<double>& w, double b,
                            std::vector<double>* grad_w, double* grad_b) {
        const std::size_t d = w.size();
        double obj = 0.0;
        for (double v : w) obj += 0.5 * v * v;
        if (grad_w) {
            grad_w->assign(d, 0.0);
            for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] = w[j];
            *grad_b = 0.0;
        }
        for (std::size_t i = 0; i < X.size(); ++i) {
            double f = b;
            for (auto& [j, v] : X[i].entries) f += w[j] * v;
            double margin = y[i] * f;
            // stable log(1+exp(-m))
            double loss = margin > 0 ? std::log1p(std::exp(-margin))
                                     : -margin + std::log1p(std::exp(margin));
            obj += C * loss;
            if (grad_w) {
                double sig = margin > 0
                                 ? std::exp(-margin) / (1.0 + std::exp(-margin))
                                 : 1.0 / (1.0 + std::exp(margin));
                double coef = -C * y[i] * sig;
                for (auto& [j, v] : X[i].entries) (*grad_w)[j] += coef * v;
                *grad_b += coef;
            }
        }
        return obj;
    }
};

}  // namespace detail

inline LinearModel train_logistic(const std::vector<SparseVec>& X,
                                  const std::vector<int>& y, int n_classes,
                                  std::size_t dim, double C, int max_iter,
                                  const std::vector<std::string>& class_names = {}) {
    detail::check_classes_present(y, n_classes, class_names);
    LinearModel m;
    m.n_classes = n_classes;
    m.dim = dim;
    m.weights.assign(n_classes, std::vector<double>(dim, 0.0));
    m.bias.assign(n_classes, 0.0);

    std::vector<int> ybin(y.size());
    std::vector<double> grad(dim), trial(dim);
    for (int cls = 0; cls < n_classes; ++cls) {
        for (std::size_t i = 0; i < y.size(); ++i)
            ybin[i] = (y[i] == cls) ? 1 : -1;
        auto& w = m.weights[cls];
        double b = 0.0;
        double gb = 0.0;
        double obj = detail::BinaryLogistic::objective(X, ybin, C, w, b,
                                                       &grad, &gb);
        for (int it = 0; it < max_iter; ++it) {
            double gnorm2 = gb * gb;
            for (double g : grad) gnorm2 += g * g;
            if (gnorm2 < 1e-12) break;
            // backtracking line search
            double step = 1.0;
            double new_obj = 0.0;
            double trial_b = b;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t j = 0; j < dim; ++j)
                    trial[j] = w[j] - step * grad[j];
                trial_b = b - step * gb;
                new_obj = detail::BinaryLogistic::objective(
                    X, ybin, C, trial, trial_b, nullptr, nullptr);
                if (new_obj <= obj - 1e-4 * step * gnorm2) break;
                step *= 0.5;
            }
            if (new_obj >= obj) break;  // no descent possible
            w.swap(trial);
            b = trial_b;
            obj = detail::BinaryLogistic::objective(X, ybin, C, w, b, &grad,
                                                    &gb);
        }
        m.bias[cls] = b;
    }
    return m;
}

enum class SgdPenalty { L2, L1, ElasticNet };

inline SgdPenalty parse_sgd_penalty(const std::string& s) {
    if (s == "l2") return SgdPenalty::L2;
    if (s == "l1") return SgdPenalty::L1;
    if (s == "elasticnet") return SgdPenalty::ElasticNet;
    throw std::runtime_error("unknown sgd penalty: " + s);
}

inline LinearModel train_sgd(const std::vector<SparseVec>& X,
                             const std::vector<int>& y, int n_classes,
                             std::size_t dim, double alpha, int max_iter,
                             SgdPenalty penalty, std::uint64_t seed,
                             const std::vector<std::string>& class_names = {}) {
    detail::check_classes_present(y, n_classes, class_names);
    LinearModel m;
    m.n_classes = n_classes;
    m.dim = dim;
    m.weights.assign(n_classes, std::vector<double>(dim, 0.0));
    m.bias.assign(n_classes, 0.0);

    const double l1_ratio = penalty == SgdPenalty::L1          ? 1.0
                            : penalty == SgdPenalty::ElasticNet ? 0.15
                                                                : 0.0;
    const double eta0 = 0.5;
    const std::size_t n = X.size();
    // epoch count: max_iter means optimization steps overall, matching the
    // grid's magnitudes; at least one full pass
    const std::size_t steps = std::max<std::size_t>(max_iter, n);

    for (int cls = 0; cls < n_classes; ++cls) {
        auto eng = rng::derive(seed, 7000 + cls);
        auto& w = m.weights[cls];
        double& b = m.bias[cls];
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::size_t pos = n;  // trigger shuffle on first step
        for (std::size_t t = 0; t < steps; ++t) {
            if (pos >= n) {
                rng::shuffle(order, eng);
                pos = 0;
            }
            const std::size_t i = order[pos++];
            const double yi = (y[i] == cls) ? 1.0 : -1.0;
            const double eta = eta0 / (1.0 + alpha * eta0 * double(t));
            double f = b;
            for (auto& [j, v] : X[i].entries) f += w[j] * v;
            if (yi * f < 1.0) {
                for (auto& [j, v] : X[i].entries) w[j] += eta * yi * v;
                b += eta * yi;
            }
            // decoupled penalty step
            const double l2 = alpha * (1.0 - l1_ratio);
            const double l1 = alpha * l1_ratio;
            if (l2 > 0.0) {
                const double shrink = 1.0 - eta * l2;
                if (shrink > 0.0)
                    for (double& wj : w) wj *= shrink;
            }
            if (l1 > 0.0) {
                const double cut = eta * l1;
                for (double& wj : w) {
                    if (wj > cut) wj -= cut;
                    else if (wj < -cut) wj += cut;
                    else wj = 0.0;
                }
            }
        }
    }
    return m;
}

}  // namespace parksent::classify
