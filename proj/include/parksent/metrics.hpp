#pragma once

// Classification metrics. Confusion rows are true labels, columns are
// predictions; per-class F1 is 0 when precision and recall are both 0.

#include <array>
#include <stdexcept>
#include <vector>

#include "parksent/attitude.hpp"

namespace parksent::classify {

struct MetricsReport {
    std::array<std::array<long, kNumLabels>, kNumLabels> confusion{};
    double accuracy = 0.0;
    std::array<double, kNumLabels> precision{};
    std::array<double, kNumLabels> recall{};
    std::array<double, kNumLabels> f1{};
    long n = 0;
};

inline MetricsReport evaluate(const std::vector<AttitudeLabel>& truth,
                              const std::vector<AttitudeLabel>& predicted) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("evaluate: size mismatch");
    if (truth.empty()) throw std::invalid_argument("evaluate: empty test set");

    MetricsReport r;
    r.n = static_cast<long>(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++r.confusion[static_cast<int>(truth[i])][static_cast<int>(predicted[i])];

    long diag = 0;
    for (int c = 0; c < kNumLabels; ++c) diag += r.confusion[c][c];
    r.accuracy = static_cast<double>(diag) / static_cast<double>(r.n);

    for (int c = 0; c < kNumLabels; ++c) {
        long tp = r.confusion[c][c];
        long pred_c = 0, true_c = 0;
        for (int k = 0; k < kNumLabels; ++k) {
            pred_c += r.confusion[k][c];
            true_c += r.confusion[c][k];
        }
        r.precision[c] = pred_c > 0 ? double(tp) / double(pred_c) : 0.0;
        r.recall[c] = true_c > 0 ? double(tp) / double(true_c) : 0.0;
        double denom = r.precision[c] + r.recall[c];
        r.f1[c] = denom > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / denom : 0.0;
    }
    return r;
}

}  // namespace parksent::classify
